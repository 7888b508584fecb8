"""Exception types shared across the package."""


class StructureError(ValueError):
    """Markov chain structure unsuitable (reducible or periodic)."""


class IntegrityError(ValueError):
    """A transmission record is internally inconsistent."""


class ImpossibleObservation(Exception):
    """The observed sequence has probability zero under the model.

    Raised instead of returning an infinite NLL so that Monte-Carlo
    aggregation cannot silently average impossible events.
    """
