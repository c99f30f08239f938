"""Exception types raised by the package."""


class PanofuseError(Exception):
    """Base class for errors raised by this package."""


class CalibrationError(PanofuseError):
    """Calibration file failed to parse or violates an invariant."""


class CloudParseError(PanofuseError):
    """Point cloud file is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DepthRangeError(PanofuseError):
    """Depth value outside the representable range of the on-disk format."""


class DegenerateOverlapError(PanofuseError):
    """Overlap region has no exclusive pixels to seed the seam terminals."""
