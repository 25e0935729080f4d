# Main configuration for the exal2 library and command line interface

import os

config = {
    "max_candidates": 2**20,
    "max_ring_order": 256,
    "max_product_order": 4096,
    "max_exhaustive_order": 64,
    "max_table_enumeration": 2**16,
    "log_level": "INFO",
    "progress": False,
    "fixtures_dir": os.path.join(os.path.dirname(os.path.dirname(__file__)), "fixtures"),
    "census_bounds": {"max_b": 4, "max_m": 2},
    "log_levels": ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
    "report_columns": ["verb", "subject", "check", "value", "passed", "witness"],
}
