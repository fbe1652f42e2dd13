"""Exception hierarchy for the toolkit.

Every domain failure derives from BtprepError so the CLI can map it to
exit code 1; anything else escaping is a bug.
"""


class BtprepError(Exception):
    """Base class for all domain errors raised by btprep."""


class MissingFile(BtprepError):
    def __init__(self, path):
        super().__init__(f"file not found: {path}")
        self.path = path


class IoFailure(BtprepError):
    pass


class MalformedLine(BtprepError):
    """A record in an input file violates its format contract."""

    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


class DuplicateId(BtprepError):
    pass


class DimensionMismatch(BtprepError):
    pass


class ZeroVector(BtprepError):
    pass


class MissingScore(BtprepError):
    def __init__(self, pair_id):
        super().__init__(f"no score for pair id {pair_id}")
        self.pair_id = pair_id


class NonFiniteScore(BtprepError):
    pass


class LineCountMismatch(BtprepError):
    pass


class TooFewPairs(BtprepError):
    pass


class EmptyInput(BtprepError):
    pass


class IdMismatch(BtprepError):
    pass


class DuplicateSourceWord(BtprepError):
    pass


class UnsupportedLanguage(BtprepError):
    def __init__(self, language):
        super().__init__(f"no romanization table registered for language '{language}'")
        self.language = language


class AlreadyTagged(BtprepError):
    pass


class BinOutOfRange(BtprepError):
    pass


class NotBTOrigin(BtprepError):
    pass


class SampleTooLarge(BtprepError):
    pass


class LengthMismatch(BtprepError):
    pass


class EmptyCorpus(BtprepError):
    pass


class DegenerateInput(BtprepError):
    pass


class TooFewScores(BtprepError):
    pass


class SetTooLarge(BtprepError):
    pass


class SelectorExceedsCorpus(BtprepError):
    pass


class ConfigError(BtprepError):
    """A config file or AssemblyConfig fails validation."""


class CommandFailed(BtprepError):
    """An external pipeline command exited nonzero."""

    def __init__(self, round_index, command, returncode):
        super().__init__(
            f"round {round_index}: command exited with status {returncode}: {command}"
        )
        self.round_index = round_index
        self.command = command
        self.returncode = returncode


class WorkdirLocked(BtprepError):
    pass
