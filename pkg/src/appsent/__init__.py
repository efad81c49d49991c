"""Sentiment analysis over Google Play reviews and student app reviews."""

__version__ = "0.1.0"

from appsent.sentiment import Sentiment

__all__ = ["Sentiment", "__version__"]
