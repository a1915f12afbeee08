"""Exception types shared across the engine, store, and service layers."""


class MoodGridError(Exception):
    """Base class for all library errors."""


class UnknownFactor(MoodGridError):
    def __init__(self, factor_id: str):
        super().__init__(f"factor not in registry: {factor_id!r}")
        self.factor_id = factor_id


class OutOfRange(MoodGridError):
    def __init__(self, factor_id: str, value: float):
        super().__init__(f"value {value!r} outside canonical range of {factor_id!r}")
        self.factor_id = factor_id
        self.value = value


class KindMismatch(MoodGridError):
    def __init__(self, factor_id: str, expected: str, got: object):
        super().__init__(f"{factor_id!r} expects a {expected} value, got {got!r}")
        self.factor_id = factor_id
        self.expected = expected
        self.got = got


class EmptyHistory(MoodGridError):
    """Raised when an operation needs at least one historical check-in."""


class InactiveFactor(MoodGridError):
    def __init__(self, factor_id: str):
        super().__init__(f"factor {factor_id!r} has no usable history")
        self.factor_id = factor_id


class EmptyCluster(MoodGridError):
    """Raised when a majority vote is requested over zero members."""


class OutOfOrderCheckIn(MoodGridError):
    """New check-in is not strictly later than the stored history."""


class UnknownUser(MoodGridError):
    def __init__(self, user_id: str):
        super().__init__(f"no such user: {user_id!r}")
        self.user_id = user_id


class UserExists(MoodGridError):
    def __init__(self, user_id: str):
        super().__init__(f"user already exists: {user_id!r}")
        self.user_id = user_id


class NoHistoryFallbackImpossible(MoodGridError):
    """No scores and no history to fall back on; nothing can be predicted."""


class InsufficientData(MoodGridError):
    """A baseline needs more rows (or more factor coverage) than available."""


class MissingHeader(MoodGridError):
    def __init__(self, missing: list[str]):
        super().__init__(f"header row lacks required columns: {missing}")
        self.missing = missing


class EmptyFile(MoodGridError):
    """Input file contains no content at all."""


class MalformedCalendar(MoodGridError):
    """Input is not an iCalendar document."""
