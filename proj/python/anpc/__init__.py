"""Rigorous pi(x) from zeta zeros.

    >>> import anpc
    >>> anpc.pi(10**6, zeros="data/zeros.txt")["pi"]
    78498
"""

import json
from fractions import Fraction

from ._core import AnpcError
from . import _core

__all__ = ["AnpcError", "pi", "bounds", "verify_zeros", "scan_zeros", "prime_count", "prime_power_correction"]


def _config(x, zeros, options):
    entries = {"x": str(int(x)), "zeros": str(zeros)}
    for key, value in options.items():
        key = key.rstrip("_")  # lambda_ stands in for the keyword
        if isinstance(value, bool):
            value = "true" if value else "false"
        entries[key] = str(value)
    return entries


def pi(x, zeros, **options):
    """Full computation; returns the report as a dict.

    Options are the configuration keys (lambda_, t1, t2, window_k,
    segment_width, precision_bits, threads, checkpoint_dir, report, timing,
    share_e1, ...). Raises AnpcError; its ``code`` attribute names the cause.
    """
    return json.loads(_core.pi_report(_config(x, zeros, options)))


def bounds(x, zeros, **options):
    """Chosen parameters and predicted bounds without running the sums."""
    return json.loads(_core.bounds_report(_config(x, zeros, options)))


def verify_zeros(path):
    return _core.verify_zeros(str(path))


def scan_zeros(t1, t2, threads=1, target_width=1e-6, precision_bits=128):
    """Zeros on the critical line in [t1, t2]: (report dict, zero file text)."""
    report, text = _core.scan_zeros(t1, t2, threads, target_width, precision_bits)
    return json.loads(report), text


def prime_count(n):
    return _core.prime_count(n)


def prime_power_correction(x):
    """pi*(x) - pi(x) as an exact Fraction."""
    return Fraction(_core.prime_power_correction(int(x)))
