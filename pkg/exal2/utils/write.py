from .configs import config
import json
import sys
import pandas as pd


def write_log(main_msg, details=None, severity="INFO"):
    """
    Formats one structured log line for a verb or a check.

    Args:
        main_msg (str): What happened, e.g. "Classified 2-extensions".
        details (dict): Counts, ring names or witnesses of the step; any JSON-serialisable value.
        severity (str): One of config["log_levels"].

    Returns:
        str: The line as JSON with keys severity, message and custom_property.
    """
    return json.dumps(
        dict(
            severity=severity,
            message=main_msg,
            custom_property=details,
        )
    )


def emit_log(main_msg, details=None, severity="INFO"):
    """
    Prints a structured log line on stderr when its severity passes the configured level.

    Args:
        main_msg (str): The main message of the log.
        details (str): Additional details to include in the log.
        severity (str): The severity level of the log.
    """
    levels = config["log_levels"]
    if levels.index(severity) >= levels.index(config["log_level"]):
        print(write_log(main_msg, details, severity), file=sys.stderr)


def build_report(records):
    """
    Turns report records into a DataFrame with canonical column and row order.

    Args:
        records (list): A list of dicts, each one check of a verb.

    Returns:
        pandas DataFrame: The report, sorted so that repeated runs give identical output.
    """
    df = pd.DataFrame(records, columns=config["report_columns"])
    df["value"] = df["value"].map(lambda v: v if isinstance(v, (int, float, bool, str)) or v is None else json.dumps(v))
    df["witness"] = df["witness"].map(lambda w: None if w is None else str(w))
    return df.sort_values(["verb", "subject", "check"], kind="stable").reset_index(drop=True)


def render_report(df, fmt="text", stream=None):
    """
    Writes a report DataFrame as an aligned text table or as line-delimited JSON.

    Args:
        df (pandas.DataFrame): The report built by build_report.
        fmt (str): Either "text" or "jsonl".
        stream: File object to write to, stdout by default.

    Raises:
        RuntimeError: If the report cannot be written.
    """
    stream = stream or sys.stdout
    try:
        if fmt == "jsonl":
            text = df.to_json(orient="records", lines=True)
        else:
            text = df.to_string(index=False)
        stream.write(text.rstrip("\n") + "\n")
    except Exception as e:
        raise RuntimeError(f"Failed report writing: {e}")
