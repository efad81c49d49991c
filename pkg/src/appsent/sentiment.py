import enum
import numbers


class Sentiment(enum.IntEnum):
    """Sentiment label. The integer order is the tie-break order everywhere."""

    Positive = 0
    Negative = 1
    Neutral = 2

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, numbers.Integral):
            return cls(int(value))
        return cls[str(value).strip().capitalize()]

    @property
    def sign(self):
        # binary encoding used by the linear models
        return {Sentiment.Positive: 1.0, Sentiment.Negative: -1.0}[self]
