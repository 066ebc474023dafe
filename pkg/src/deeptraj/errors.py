"""Exception hierarchy shared by every module."""


class DeepTrajError(Exception):
    """Base class for all errors raised by deeptraj."""


class ShapeMismatch(DeepTrajError, ValueError):
    pass


class LengthMismatch(DeepTrajError, ValueError):
    pass


class SizeMismatch(DeepTrajError, ValueError):
    pass


class ConstantVector(DeepTrajError, ValueError):
    pass


class ConstantColumn(ConstantVector):
    pass


class TooFewPoints(DeepTrajError, ValueError):
    pass


class DegenerateCovariance(DeepTrajError, ValueError):
    pass


class EmptyBatch(DeepTrajError, ValueError):
    pass


class EmptyDataset(DeepTrajError, ValueError):
    pass


class EmptyInput(EmptyDataset):
    pass


class EmptyTrajectory(DeepTrajError, ValueError):
    pass


class EmptyConfig(DeepTrajError, ValueError):
    pass


class EmptyData(DeepTrajError, ValueError):
    pass


class NonFiniteLoss(DeepTrajError, FloatingPointError):
    pass


class KTooLarge(DeepTrajError, ValueError):
    pass


class DegeneratePartition(DeepTrajError, ValueError):
    pass


class DegenerateCluster(DeepTrajError, RuntimeError):
    pass


class SingularDesign(DeepTrajError, ValueError):
    pass


class ParseError(DeepTrajError, ValueError):
    pass


class RaggedRows(ParseError):
    pass


class NonFiniteValue(ParseError):
    pass


class DuplicateId(ParseError):
    pass


class ConfigError(DeepTrajError, ValueError):
    """Unknown key or badly typed value in a run configuration."""


class IoError(DeepTrajError, OSError):
    pass
