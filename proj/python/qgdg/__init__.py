"""Guided decimation guessing decoder for quantum LDPC codes."""

from ._qgdg import (
    ContractError,
    CssCode,
    DemParseError,
    DetectorModel,
    data_qubit_model,
    decode,
    load_code,
    parse_dem,
    phenomenological_model,
    preset_names,
    sample,
    simulate,
    single_shot_model,
    wilson_interval,
)

__all__ = [
    "ContractError",
    "CssCode",
    "DemParseError",
    "DetectorModel",
    "data_qubit_model",
    "decode",
    "load_code",
    "parse_dem",
    "phenomenological_model",
    "preset_names",
    "sample",
    "simulate",
    "single_shot_model",
    "wilson_interval",
]
