"""Embedding loading, sequence encoding and small recurrent/convolutional nets."""
from appsent.neural.embeddings import (PAD_ID, EmbeddingTable, GloveError, SequenceBatch,
                                       build_embedding_matrix, encode_sequences, load_glove)
from appsent.neural.models import (Arch, Shapes, backward, cross_entropy, forward,
                                   init_params, loss, predict_codes, softmax)
from appsent.neural.train import (EpochRecord, NeuralConfig, NeuralModel, TrainingDiverged,
                                  TrainingHistory, train)

__all__ = [
    "PAD_ID", "Arch", "EmbeddingTable", "EpochRecord", "GloveError", "NeuralConfig",
    "NeuralModel", "SequenceBatch", "Shapes", "TrainingDiverged", "TrainingHistory",
    "backward", "build_embedding_matrix", "cross_entropy", "encode_sequences", "forward",
    "init_params", "load_glove", "loss", "predict_codes", "softmax", "train",
]
