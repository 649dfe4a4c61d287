"""channelwave: channel-of-energy and soliton-resolution numerics for the radial
focusing quintic wave equation in three dimensions."""

from .errors import (AmbiguousCount, ChannelWaveError, HorizonExceeded, InsufficientEnergy,
                     InvalidArgument, InvalidState, NotApplicable, SignUndetermined)
from .radial_state import (BumpPreset, CharacteristicPreset, RadialGrid, SolitonPreset, State,
                           SumPreset, Trajectory, ZeroPreset, make_grid, rescale_state,
                           sample_preset)
from .ground_state import SolitonParams, pohozaev_report, soliton_state, w_value
from .energetics import exterior_energy, flux_seminorm, norms, psi_truncate
from .dalembert import CharacteristicProfile, from_characteristic, to_characteristic
from .nlw import EvolveConfig, evolve

__version__ = "0.1.0"

__all__ = ["AmbiguousCount", "BumpPreset", "ChannelWaveError", "CharacteristicPreset",
           "CharacteristicProfile", "EvolveConfig", "HorizonExceeded", "InsufficientEnergy",
           "InvalidArgument", "InvalidState", "NotApplicable", "RadialGrid", "SignUndetermined",
           "SolitonParams", "SolitonPreset", "State", "SumPreset", "Trajectory", "ZeroPreset",
           "evolve", "exterior_energy", "flux_seminorm", "from_characteristic", "make_grid",
           "norms", "pohozaev_report", "psi_truncate", "rescale_state", "sample_preset",
           "soliton_state", "to_characteristic", "w_value"]
