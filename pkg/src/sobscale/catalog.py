"""A fixed catalog of weight specifications used by suites and tests.

The entries cover pure powers, power-log and power-loglog combinations, and
both borderline directions of the C^p criterion.  ``ESTIMATOR_CATALOG``
restricts to weights whose translation-ratio extremes sit at t-grid endpoints
(log and loglog exponents not of opposite sign), where the index estimator's
bracket is sharp.
"""

from __future__ import annotations

from typing import Dict

from .grammar import parse_weight
from .weights import RegularityIndex

CATALOG: Dict[str, str] = {
    "one": "pow(0)",
    "t_half": "pow(0.5)",
    "t_3q": "pow(0.75)",
    "t": "pow(1)",
    "t_13": "pow(1.3)",
    "t_32": "pow(1.5)",
    "t_2": "pow(2)",
    "t_log": "pow(1) * log(1)",
    "t_log_inv": "pow(1) * log(-1)",
    "t2_log": "pow(2) * log(1)",
    "t2_log3_inv": "pow(2) * log(-3)",
    "t_half_log": "pow(0.5) * log(1)",
    "t_loglog2": "pow(1) * loglog(2)",
    "t32_loglog_inv": "pow(1.5) * loglog(-1)",
    "t2_log_loglog": "pow(2) * log(1) * loglog(-1)",
}

ESTIMATOR_CATALOG = (
    "one",
    "t_half",
    "t_3q",
    "t",
    "t_13",
    "t_32",
    "t_2",
    "t_log",
    "t_log_inv",
    "t2_log",
    "t2_log3_inv",
    "t_half_log",
    "t_loglog2",
    "t32_loglog_inv",
)


def catalog_weight(name: str) -> RegularityIndex:
    return parse_weight(CATALOG[name])


def catalog_weights(names=None) -> Dict[str, RegularityIndex]:
    names = names or list(CATALOG)
    return {name: catalog_weight(name) for name in names}
