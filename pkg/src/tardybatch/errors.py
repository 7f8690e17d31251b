"""Exception hierarchy.

Every error raised by the package derives from :class:`SchedulingError`, so
callers (the CLI in particular) can separate validation problems from bugs.
"""


class SchedulingError(Exception):
    """Base class for all package errors."""


class ValidationError(SchedulingError):
    """An instance or solution record breaks one or more invariants.

    ``problems`` lists every violation found, not only the first one.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(str(p) for p in self.problems))


class NonPositiveField(ValidationError):
    pass


class OversizedJob(ValidationError):
    pass


class DuplicateId(ValidationError):
    pass


class EmptyInstance(ValidationError):
    pass


class NotAPartition(ValidationError):
    pass


class CapacityViolation(ValidationError):
    pass


class NotAPermutation(ValidationError):
    pass


class NotSamePermutationSet(ValidationError):
    pass


class InvalidPosition(SchedulingError, IndexError):
    pass


class PoolTooSmall(SchedulingError):
    pass


class TooLarge(SchedulingError):
    pass
