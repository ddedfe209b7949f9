"""Four-step driven lattice model, its static discrete-time counterpart, and tools comparing them."""
from floqlat.floquet import ModelParams
from floqlat.spectra import MomentumPoint, SpectrumTable, StripSpectrum

__version__ = "0.1.0"

__all__ = ["ModelParams", "MomentumPoint", "SpectrumTable", "StripSpectrum", "__version__"]
