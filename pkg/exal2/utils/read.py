from .configs import config
from .errors import Exal2Error, FixtureError
from .write import emit_log
from ..defm import deformation_problem, make_frame, preset_problem
from ..ext2 import canonical_self_difference_splitting, identity_butterfly, ideal_2extension, trivial_2extension
from ..extn import ideal_extension
from ..finring import (
    identity_hom,
    make_ideal,
    polynomial_quotient,
    preset,
    residue_module,
    ring_as_module,
    ring_hom,
    ring_homs,
    validate_module,
    validate_ring,
    zero_module,
    zmod,
)
from ..tfunctors import presentation
import glob
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional
from pydantic import BaseModel, ValidationError


class RingSpec(BaseModel):
    preset: Optional[str] = None
    zmod: Optional[int] = None
    p: Optional[int] = None
    polys: Optional[List[List[int]]] = None
    add: Optional[List[List[int]]] = None
    mul: Optional[List[List[int]]] = None
    zero: int = 0
    one: int = 1
    labels: Optional[List[str]] = None


class ModuleSpec(BaseModel):
    ring: str
    kind: str = "regular"
    map: Optional[str] = None
    add: Optional[List[List[int]]] = None
    act: Optional[List[List[int]]] = None
    zero: int = 0


class MapSpec(BaseModel):
    source: str
    target: str
    table: Optional[List[int]] = None


class TwoExtensionSpec(BaseModel):
    kind: str
    ring: str
    module: Optional[str] = None
    J: Optional[List[int]] = None
    L: Optional[List[int]] = None


class ButterflySpec(BaseModel):
    kind: str
    of: str


class ProblemSpec(BaseModel):
    preset: Optional[str] = None
    ring: Optional[str] = None
    ideal: Optional[List[int]] = None
    target: Optional[str] = None
    module: Optional[str] = None
    phi: Optional[List[int]] = None
    obstructed: Optional[bool] = None


class PresentationSpec(BaseModel):
    p: int
    generators: List[str] = []
    rules: List[str] = []
    relations: List[str] = []
    degree_bound: int = 4


class FrameSpec(BaseModel):
    A: str
    B: str
    C: str
    module: str
    u: Optional[str] = None
    v: Optional[str] = None


class FixtureEnvelope(BaseModel):
    rings: Dict[str, RingSpec] = {}
    modules: Dict[str, ModuleSpec] = {}
    maps: Dict[str, MapSpec] = {}
    two_extensions: Dict[str, TwoExtensionSpec] = {}
    butterflies: Dict[str, ButterflySpec] = {}
    problems: Dict[str, ProblemSpec] = {}
    presentations: Dict[str, PresentationSpec] = {}
    frames: Dict[str, FrameSpec] = {}
    notes: List[str] = []


KINDS = ["rings", "modules", "maps", "two_extensions", "butterflies", "problems", "presentations", "frames"]


@dataclass
class FixtureBundle:
    rings: Dict = field(default_factory=dict)
    modules: Dict = field(default_factory=dict)
    maps: Dict = field(default_factory=dict)
    two_extensions: Dict = field(default_factory=dict)
    butterflies: Dict = field(default_factory=dict)
    problems: Dict = field(default_factory=dict)
    presentations: Dict = field(default_factory=dict)
    frames: Dict = field(default_factory=dict)
    expectations: Dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def get(self, kind, name):
        """
        Looks up a named object of one kind.

        Raises:
            FixtureError: If the name is unknown.
        """
        table = getattr(self, kind)
        if name not in table:
            raise FixtureError(f"Unknown {kind[:-1]} {name}; known: {sorted(table)}")
        return table[name]


def read_envelope(path):
    """
    Reads one fixture file into its envelope.

    Args:
        path (str): Path of a JSON fixture file.

    Returns:
        FixtureEnvelope: The parsed, schema-checked envelope.

    Raises:
        FixtureError: If the file cannot be read or does not match the schema.
    """
    try:
        with open(path) as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise FixtureError(f"Failed fixture reading {path}: {e}")
    try:
        return FixtureEnvelope.model_validate(payload)
    except ValidationError as e:
        raise FixtureError(f"Fixture {path} does not match the schema: {e}")


def merge_envelopes(envelopes):
    """
    Merges the envelopes of several files; a name may be defined once per kind.

    Raises:
        FixtureError: On duplicate names.
    """
    merged = FixtureEnvelope()
    for env in envelopes:
        merged.notes.extend(env.notes)
        for kind in KINDS:
            target = getattr(merged, kind)
            for name, spec in getattr(env, kind).items():
                if name in target:
                    raise FixtureError(f"{kind} {name} is defined twice")
                target[name] = spec
    return merged


def _unique_hom(source, target, what):
    homs = ring_homs(source, target, limit=2)
    if len(homs) != 1:
        raise FixtureError(f"{what}: expected exactly one ring map {source.name} -> {target.name}, found {len(homs)}")
    return homs[0]


def _build_ring(name, spec):
    if spec.preset is not None:
        return preset(spec.preset)
    if spec.zmod is not None:
        return zmod(spec.zmod)
    if spec.polys is not None and spec.p is not None:
        return polynomial_quotient(spec.p, spec.polys, name)
    if spec.add is not None and spec.mul is not None:
        return validate_ring(spec.add, spec.mul, spec.zero, spec.one, spec.labels, name)
    raise FixtureError(f"ring {name} needs one of preset, zmod, p with polys, or tables")


def _build_module(bundle, name, spec):
    R = bundle.get("rings", spec.ring)
    if spec.kind == "regular":
        return ring_as_module(R)
    if spec.kind == "residue":
        h = bundle.get("maps", spec.map) if spec.map else _unique_hom(R, zmod(R.characteristic), f"module {name}")
        return residue_module(R, h)
    if spec.kind == "zero":
        return zero_module(R)
    if spec.kind == "table":
        return validate_module(R, spec.add, spec.act, spec.zero, None, name)
    raise FixtureError(f"module {name} has unknown kind {spec.kind}")


def _build_map(bundle, name, spec):
    S, T = bundle.get("rings", spec.source), bundle.get("rings", spec.target)
    if spec.table is None:
        return _unique_hom(S, T, f"map {name}")
    return ring_hom(S, T, spec.table)


def _build_two_extension(bundle, name, spec):
    S = bundle.get("rings", spec.ring)
    if spec.kind == "trivial":
        return trivial_2extension(S, bundle.get("modules", spec.module))
    if spec.kind == "ideal":
        return ideal_2extension(S, make_ideal(S, spec.J), make_ideal(S, spec.L))
    raise FixtureError(f"2-extension {name} has unknown kind {spec.kind}")


def _build_butterfly(bundle, name, spec):
    xi = bundle.get("two_extensions", spec.of)
    if spec.kind == "identity":
        return identity_butterfly(xi)
    if spec.kind == "self_difference":
        return canonical_self_difference_splitting(xi)
    raise FixtureError(f"butterfly {name} has unknown kind {spec.kind}")


def _build_problem(bundle, name, spec):
    if spec.preset is not None:
        return preset_problem(spec.preset)
    Ap = bundle.get("rings", spec.ring)
    omega = ideal_extension(Ap, make_ideal(Ap, spec.ideal), identity_hom(Ap))
    B = bundle.get("rings", spec.target)
    base = _unique_hom(omega.B, B, f"problem {name}")
    return deformation_problem(omega, base, bundle.get("modules", spec.module), spec.phi, name)


def _build_frame(bundle, name, spec):
    A, B, C = (bundle.get("rings", r) for r in (spec.A, spec.B, spec.C))
    u = bundle.get("maps", spec.u) if spec.u else _unique_hom(A, B, f"frame {name}")
    v = bundle.get("maps", spec.v) if spec.v else _unique_hom(B, C, f"frame {name}")
    return make_frame(u, v, bundle.get("modules", spec.module))


def build_bundle(env):
    """
    Builds and revalidates every object of a merged envelope.

    Returns:
        FixtureBundle: Named mathematical objects.

    Raises:
        FixtureError: If a reference does not resolve or an object fails validation.
    """
    bundle = FixtureBundle(notes=list(env.notes))
    builders = [
        ("rings", lambda name, spec: _build_ring(name, spec)),
        ("modules", lambda name, spec: _build_module(bundle, name, spec)),
        ("maps", lambda name, spec: _build_map(bundle, name, spec)),
        ("two_extensions", lambda name, spec: _build_two_extension(bundle, name, spec)),
        ("butterflies", lambda name, spec: _build_butterfly(bundle, name, spec)),
        ("problems", lambda name, spec: _build_problem(bundle, name, spec)),
        ("presentations", lambda name, spec: presentation(spec.p, spec.generators, spec.rules, spec.relations, spec.degree_bound, name)),
        ("frames", lambda name, spec: _build_frame(bundle, name, spec)),
    ]
    for kind, build in builders:
        for name, spec in sorted(getattr(env, kind).items()):
            try:
                getattr(bundle, kind)[name] = build(name, spec)
            except FixtureError:
                raise
            except (Exal2Error, KeyError, TypeError) as e:
                raise FixtureError(f"{kind} {name} failed to build: {type(e).__name__}: {e}")
    bundle.expectations = {name: spec.obstructed for name, spec in env.problems.items() if spec.obstructed is not None}
    return bundle


def load_fixtures(directory=None):
    """
    Loads every *.json file of a fixture directory into one bundle.

    Args:
        directory (str): Fixture directory; config["fixtures_dir"] by default.

    Returns:
        FixtureBundle: The merged, validated fixtures.

    Raises:
        FixtureError: If the directory is missing or any file is invalid.
    """
    directory = directory or config["fixtures_dir"]
    if not os.path.isdir(directory):
        raise FixtureError(f"Fixture directory {directory} does not exist")
    paths = sorted(glob.glob(os.path.join(directory, "*.json")))
    bundle = build_bundle(merge_envelopes(read_envelope(path) for path in paths))
    emit_log("Loaded fixtures", {"directory": directory, "files": len(paths), **{k: len(getattr(bundle, k)) for k in KINDS}}, severity="DEBUG")
    return bundle
