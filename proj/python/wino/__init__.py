"""Winograd convolution layers: transforms, forward/backward, sparse inference."""

from ._wino import (
    CapabilityError,
    IoError,
    NumericError,
    ShapeError,
    conv_direct,
    conv_winograd,
    conv_winograd_grad,
    density,
    gen_transforms,
    lift,
    perf,
    read_wgt1,
    sparse_conv,
    write_wgt1,
)

__all__ = [
    "CapabilityError",
    "IoError",
    "NumericError",
    "ShapeError",
    "conv_direct",
    "conv_winograd",
    "conv_winograd_grad",
    "density",
    "gen_transforms",
    "lift",
    "perf",
    "read_wgt1",
    "sparse_conv",
    "write_wgt1",
]
