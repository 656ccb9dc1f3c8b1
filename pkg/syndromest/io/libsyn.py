# Library functions shared within SyndromEst
"""Shared functions and exceptions for the SyndromEst package.
"""

import hashlib
import json
import os
import shutil
import warnings

import numpy as np

from syndromest.settings import config


class SyndromestError(Exception):
    """Base class for package errors."""


class ConfigError(SyndromestError, ValueError):
    """Invalid configuration, input file, or argument."""


class DimensionError(ConfigError):
    """Operands of mismatched sizes."""


class UnsupportedCodeError(ConfigError):
    """Operation not available for the given code."""


class ModelError(ConfigError):
    """Invalid error model."""


class BudgetError(ConfigError):
    """Exact enumeration would exceed the configured budget."""

    def __init__(self, msg, size=None):
        super().__init__(msg)
        #: int: Estimated enumeration size.
        self.size = size


class NumericalError(SyndromestError, ArithmeticError):
    """Numerical failure during inference or estimation."""


class ZeroSupportError(NumericalError):
    """Observed syndrome has zero probability under the model."""

    def __init__(self, msg, syndrome=None):
        super().__init__(msg)
        #: Offending syndrome bits.
        self.syndrome = syndrome


class PositivityError(NumericalError):
    """A rate or probability required to be positive is zero."""


class IllConditionedError(NumericalError):
    """Denominator too close to zero."""


class InconsistentMomentsError(NumericalError):
    """Moments incompatible with the assumed model."""


class RecursionConsistencyError(NumericalError):
    """Recursion produced a non-integer count."""


def printv(*s):
    """Print to console only if verbose.

    Args:
        s: Variable number of strings to be printed
            if :attr:``config.verbose`` is true.
    """
    if config.verbose:
        print(*s)


def warn(msg, category=UserWarning, stacklevel=2):
    """Print a warning message.

    Args:
        msg (str): Message to print.
        category (Exception): Warning category class.
        stacklevel: Warning message level.

    """
    warnings.warn(msg, category, stacklevel=stacklevel)


def is_seq(val):
    """Check if a value is a non-string sequence.

    Arg:
        val: Value to check.

    Returns:
        True if the value is a list, tuple, or Numpy array.
    """
    return np.ndim(val) != 0


def to_seq(val):
    """Wrap a value in a sequence if not already a sequence or None.

    Args:
        val (Any): Value to wrap in a sequence.

    Returns:
        List: A sequence of the value if it is not already a sequence, or
        otherwise the sequence itself. If ``val`` is None, ``val`` is
        simply returned.

    """
    if not is_seq(val) and val is not None:
        val = [val]
    return val


def get_enum(s, enum_class):
    """Get an enum from a string where the enum class is assumed to have
    all upper-case keys, returning None if the key is not found.

    Args:
        s (str): Key of enum to find, case-insensitive.
        enum_class (:class:`Enum`): Enum class to search.

    Returns:
        The enum if found, otherwise None.

    """
    if isinstance(s, enum_class):
        return s
    enum = None
    if s:
        try:
            enum = enum_class[str(s).upper()]
        except KeyError:
            pass
    return enum


def enum_names_aslist(c, lower=True):
    """Get an Enum class as a list of enum names.

    Args:
        c (:class:`Enum`): Enum class.
        lower (bool): True to get names as lower case; defaults to True for
            easier comparison with other strings.

    Returns:
        List: List of enum names.

    """
    return [e.name.lower() if lower else e.name for e in c]


def insert_before_ext(name, insert, sep=""):
    """Splice ``insert`` just before the extension in ``name``.

    Args:
        name (str): Path; if no dot is present in the basename, simply
            merge the string components.
        insert (str): String to insert before the extension in ``name``.
        sep (str): Separator between ``name`` and ``insert``; defaults to an
           empty string.

    Returns:
        str: ``name`` with ``insert`` inserted just before the extension.
    """
    if os.path.basename(name).find(".") == -1:
        return name + sep + insert
    return "{0}{2}{3}.{1}".format(*name.rsplit(".", 1), sep, insert)


def backup_file(path, modifier="", i=None):
    """Backup a file to the next available path with an index number
    before the extension.

    The backed up path will be in the format
    ``path-before-ext[modifier](i).ext``, where ``i`` is incremented to
    avoid overwriting an existing file.

    Args:
        path (str): Path of file to backup.
        modifier (str): Modifier string to place before the index number.
        i (int): Starting index; defaults to None to start from 1.
    """
    if not i:
        if not os.path.exists(path):
            return
        i = 1
    while True:
        backup_path = insert_before_ext(path, "{}({})".format(modifier, i))
        if not os.path.exists(backup_path):
            shutil.move(path, backup_path)
            print("Backed up {} to {}".format(path, backup_path))
            break
        i += 1


def _json_default(val):
    # make Enums, Numpy scalars, and arrays JSON serializable
    if hasattr(val, "name") and hasattr(val, "value"):
        return val.name.lower()
    if isinstance(val, np.ndarray):
        return val.tolist()
    if isinstance(val, np.generic):
        return val.item()
    return str(val)


def to_json(obj, **kwargs):
    """Serialize to canonical JSON with sorted keys.

    Args:
        obj: Object to serialize; Enums are given by lower-case name and
            Numpy types are converted to Python types.
        **kwargs: Extra arguments to :func:`json.dumps`.

    Returns:
        str: JSON string.

    """
    return json.dumps(obj, sort_keys=True, default=_json_default, **kwargs)


def config_hash(settings):
    """Hash a settings dictionary.

    Args:
        settings (dict): Settings to hash.

    Returns:
        str: SHA-256 hex digest of the canonical JSON of ``settings``.

    """
    return hashlib.sha256(to_json(settings).encode("utf8")).hexdigest()


def write_json(obj, path):
    """Write an object to a JSON file, backing up any existing file.

    Args:
        obj: Object to write.
        path (str): Output path.

    Returns:
        str: ``path``.

    """
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    backup_file(path)
    with open(path, "w") as f:
        f.write(to_json(obj, indent=2))
    print("exported results to JSON file: \"{}\"".format(path))
    return path
