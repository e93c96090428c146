from . import kernels, ops

__all__ = ["kernels", "ops"]
