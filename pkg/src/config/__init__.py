"""Configuration for numerical defaults.

Values are read from the packaged `default.yml`, then from the first user
file that exists, then from environment variables with the prefix
`SELFADJOINT_` (nested keys are joined by `__`, e.g.
`SELFADJOINT_ANGLES__N_ANGLES=32`).
"""

import collections.abc
import functools
import os
import pathlib

import confuse

from ..exceptions import ConfigInvalidError

CONFIG_DIR = pathlib.Path(__file__).parent
CONFIG_YML_LOCATION = os.path.expanduser(
    os.path.join(
        "~",
        ".selfadjoint",
        "config.yml",
    )
)

__all__ = ["get_value", "TEMPLATE"]


TEMPLATE = {
    "angles": confuse.MappingTemplate(
        {
            "n_angles": confuse.Integer(),
            "kind": confuse.Choice(["double", "full", "graded"]),
            "panels": confuse.Integer(),
        }
    ),
    "fourier": confuse.MappingTemplate(
        {
            "decay_tolerance": confuse.Number(),
            "min_nodes_per_period": confuse.Number(),
            "min_window_distance": confuse.Number(),
            "p_max": confuse.Integer(),
            "p_per_unit": confuse.Integer(),
            "block_size": confuse.Integer(),
        }
    ),
    "construction": confuse.MappingTemplate(
        {
            "cells": confuse.Integer(),
            "nodes_per_cell": confuse.Integer(),
            "bump_nodes": confuse.Integer(),
            "position_angles": confuse.Integer(),
            "position_panels": confuse.Integer(),
            "position_nodes": confuse.Integer(),
            "band_tolerance": confuse.Number(),
            "tail_tolerance": confuse.Number(),
        }
    ),
    "hardy": confuse.MappingTemplate(
        {
            "eta_ladder": confuse.Sequence(confuse.Number()),
            "convergence_tolerance": confuse.Number(),
            "guard_band": confuse.Number(),
            "x_max": confuse.Number(),
            "nodes_per_unit": confuse.Integer(),
            "bundle_guard": confuse.Number(),
            "bundle_p_max": confuse.Number(),
            "bundle_per_panel": confuse.Integer(),
            "bundle_x_nodes": confuse.Integer(),
            "plane_x_max": confuse.Number(),
            "plane_y_range": confuse.Sequence(confuse.Number()),
            "plane_per_unit": confuse.Integer(),
        }
    ),
    "lab": confuse.MappingTemplate(
        {
            "krylov_max_iter": confuse.Integer(),
            "krylov_tol": confuse.Number(),
            "nullspace_tol": confuse.Number(),
            "ratio_threshold": confuse.Number(),
            "scan_q_nodes": confuse.Integer(),
            "scan_p_nodes": confuse.Integer(),
            "scan_x_nodes": confuse.Integer(),
            "scan_q_min": confuse.Number(),
            "scan_q_max": confuse.Number(),
            "scan_p_max": confuse.Number(),
            "scan_window": confuse.Sequence(confuse.Number()),
            "max_matrix_entries": confuse.Integer(),
            "oracle_x_nodes": confuse.Integer(),
            "oracle_periods": confuse.Integer(),
        }
    ),
    "sphere": confuse.MappingTemplate(
        {
            "n_theta": confuse.Integer(),
            "m_psi": confuse.Integer(),
        }
    ),
    "tolerances": confuse.MappingTemplate(
        {
            "membership": confuse.Number(),
            "leakage": confuse.Number(),
            "azimuthal": confuse.Number(),
            "fourier_null": confuse.Number(),
            "oracle_ratio": confuse.Number(),
        }
    ),
    "threads": confuse.Integer(),
}


@functools.cache
def get_value(
    user_config_filenames: collections.abc.Iterable[str] = (
        CONFIG_YML_LOCATION,
        os.path.join(".selfadjoint", "config.yml"),
    ),
) -> confuse.templates.AttrDict:
    """Get the numerical configuration

    Args:
        user_config_filenames (:obj:`tuple`, optional): paths to the user's configuration files [default: :obj:`('~/.selfadjoint/config.yml', './.selfadjoint/config.yml')`]

    Returns:
        :obj:`confuse.templates.AttrDict`: validated configuration
    """

    value = confuse.Configuration("selfadjoint", __name__, read=False)

    # read the default configuration
    value.set_file(os.path.join(CONFIG_DIR, "default.yml"))

    # read configuration overrides from the user
    for user_config_filename in user_config_filenames:
        if os.path.isfile(user_config_filename):
            value.set_file(user_config_filename)
            break

    # read configuration from environment variables
    value.set_env(sep="__")

    try:
        validated_value = value.get(TEMPLATE)
    except (
        confuse.exceptions.ConfigTypeError,
        confuse.exceptions.ConfigValueError,
    ) as exception:
        detail = str(exception).replace("\n", "\n  ")
        raise ConfigInvalidError(f"The configuration is not valid:\n  {detail}")

    if validated_value.sphere.m_psi < 16 or validated_value.sphere.m_psi & (
        validated_value.sphere.m_psi - 1
    ):
        raise ConfigInvalidError(
            "The configuration is not valid:\n  sphere.m_psi must be a power of two >= 16"
        )
    if validated_value.angles.n_angles < 2 or validated_value.angles.n_angles % 2:
        raise ConfigInvalidError(
            "The configuration is not valid:\n  angles.n_angles must be even and >= 2"
        )
    angles = validated_value.angles
    if angles.kind == "graded" and (angles.panels < 1 or angles.n_angles % (2 * angles.panels)):
        raise ConfigInvalidError(
            "The configuration is not valid:\n  angles.n_angles must be a multiple of 2 * angles.panels"
        )

    return validated_value
