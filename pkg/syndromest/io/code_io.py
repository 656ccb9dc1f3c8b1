# Code, noise model, and dataset files
"""Read code definitions, noise models, and syndrome datasets.

A code file holds ``{"n": 5, "generators": [...], "logicals": [[X_L, Z_L]]}``
with Pauli letter strings, qubit 1 first. A model file holds either a
preset, ``{"depolarizing": p}`` or ``{"phenomenological": p, "p_m": q}``,
or explicit sets ``{"sets": [{"elements": [...], "rates": [...]}]}``.
"""

import os

import numpy as np
import pandas as pd

from syndromest.io import df_io, libsyn, yaml_io
from syndromest.qec import codes, noise, pauli
from syndromest.settings import config

#: str: Dataset column holding syndrome bit strings, bit 1 first.
COL_SYNDROME = "syndrome"


def parse_code_name(name):
    """Parse a code name such as ``five_qubit`` or ``repetition:5``.

    Returns:
        :class:`config.CodeNames`, int: Code name and qubit count for
        repetition codes, otherwise None.

    """
    base, _, arg = str(name).strip().lower().partition(":")
    try:
        code_name = config.CodeNames(base)
    except ValueError:
        raise libsyn.ConfigError("unknown code {!r}; choose from {}".format(
            name, [c.value for c in config.CodeNames]))
    n = None
    if arg:
        if code_name is not config.CodeNames.REPETITION:
            raise libsyn.ConfigError(
                "only repetition codes take a size: {!r}".format(name))
        try:
            n = int(arg)
        except ValueError:
            raise libsyn.ConfigError("invalid code size in {!r}".format(name))
    return code_name, n


def code_from_dict(spec, name="custom"):
    """Build a code from a definition dictionary."""
    try:
        gens = tuple(pauli.PauliString.from_label(g)
                     for g in spec["generators"])
    except KeyError:
        raise libsyn.ConfigError("code definitions need generators")
    logicals = tuple(
        (pauli.PauliString.from_label(x), pauli.PauliString.from_label(z))
        for x, z in spec.get("logicals", []))
    if "n" in spec and any(g.n != spec["n"] for g in gens):
        raise libsyn.DimensionError(
            "generators are not on {} qubits".format(spec["n"]))
    return pauli.StabilizerCode(gens, logicals, spec.get("name", name))


def load_code(path):
    """Load a code definition file, or build a named code.

    Args:
        path (str): JSON or YAML file, or a name accepted by
            :func:`parse_code_name`.

    Returns:
        :class:`pauli.StabilizerCode`: Code.

    """
    if not os.path.exists(path):
        return codes.build_code(*parse_code_name(path))
    spec = yaml_io.load_doc(path)
    return code_from_dict(
        spec, os.path.splitext(os.path.basename(path))[0])


def load_model(src, code, n_bits=None):
    """Load a noise model.

    Args:
        src (Union[str, dict]): Model file path or dictionary.
        code (:class:`pauli.StabilizerCode`): Code the model acts on.
        n_bits (int): Syndrome bits for flip rates; defaults to None to
            use ``code.l``.

    Returns:
        Union[:class:`noise.SingleQubitPauliRates`,
        :class:`noise.DecomposableModel`]: Rates for presets, otherwise
        the explicit model.

    """
    spec = src if isinstance(src, dict) else yaml_io.load_doc(src)
    n_bits = code.l if n_bits is None else n_bits
    if "depolarizing" in spec:
        return noise.SingleQubitPauliRates.depolarizing(
            code.n, float(spec["depolarizing"]))
    if "phenomenological" in spec:
        if "p_m" not in spec:
            raise libsyn.ConfigError("phenomenological models need p_m")
        return noise.SingleQubitPauliRates.depolarizing(
            code.n, float(spec["phenomenological"]), n_bits,
            float(spec["p_m"]))
    if "sets" in spec:
        return noise.model_from_sets(code.n, spec.get("l", 0), spec["sets"])
    raise libsyn.ConfigError(
        "model needs depolarizing, phenomenological, or sets")


def as_model(model, code):
    """Decomposable model for rates objects or models."""
    if isinstance(model, noise.SingleQubitPauliRates):
        return model.to_model(code)
    return model


def dataset_to_csv(dataset, path, config_hash=None, seed=None):
    """Save syndromes as bit strings, one row per syndrome."""
    rows = ["".join(str(b) for b in row) for row in dataset.bits]
    df = pd.DataFrame({COL_SYNDROME: rows})
    df_io.add_provenance(df, config_hash, seed)
    return df_io.data_frames_to_csv(df, path)


def load_dataset(path):
    """Load syndromes saved by :func:`dataset_to_csv`.

    Returns:
        :obj:`np.ndarray`, int: ``(n, n_bits)`` bits and the recorded seed,
        or None.

    """
    if not os.path.exists(path):
        raise libsyn.ConfigError("{} not found".format(path))
    df = pd.read_csv(path, dtype={COL_SYNDROME: str})
    if COL_SYNDROME not in df.columns:
        raise libsyn.ConfigError("{} has no syndrome column".format(path))
    strings = df[COL_SYNDROME].tolist()
    if not strings or len({len(s) for s in strings}) != 1:
        raise libsyn.ConfigError("syndromes must be nonempty, equal length")
    bits = np.array([[int(c) for c in s] for s in strings], dtype=np.uint8)
    seed = None
    col = config.MetaCols.SEED.value
    if col in df.columns and not pd.isna(df[col].iloc[0]):
        seed = int(df[col].iloc[0])
    return bits, seed
