"""RNN, LSTM and 1-D CNN sentence classifiers with hand-written backprop.

Parameters live in a dict of float64 arrays:

* ``E``  embedding matrix, row 0 is the pad vector
* ``Wx``, ``Wh``, ``b``  recurrence (LSTM gate blocks ordered i, f, o, g)
* ``Wc``, ``bc``  convolution filters over ``width * dim`` windows
* ``Wo``, ``bo``  output layer onto the two classes (Positive, Negative)

Embeddings of pad positions are zeroed by a length mask, so the pad row never
reaches the output. Recurrent states stop updating after a row's last real
token, and only windows that start inside the row can win the max-pool.
"""
import enum
from dataclasses import dataclass

import numpy as np

N_CLASSES = 2


class Arch(enum.Enum):
    RNN = "RNN"
    LSTM = "LSTM"
    CNN = "CNN"


PARAM_NAMES = {
    Arch.RNN: ("E", "Wx", "Wh", "b", "Wo", "bo"),
    Arch.LSTM: ("E", "Wx", "Wh", "b", "Wo", "bo"),
    Arch.CNN: ("E", "Wc", "bc", "Wo", "bo"),
}


@dataclass
class Shapes:
    vocab_rows: int
    embed_dim: int
    hidden: int = 100
    filters: int = 64
    width: int = 3


def param_shapes(arch, s):
    arch = Arch(arch)
    d, H = s.embed_dim, s.hidden
    if arch is Arch.RNN:
        return {"E": (s.vocab_rows, d), "Wx": (d, H), "Wh": (H, H), "b": (H,),
                "Wo": (H, N_CLASSES), "bo": (N_CLASSES,)}
    if arch is Arch.LSTM:
        return {"E": (s.vocab_rows, d), "Wx": (d, 4 * H), "Wh": (H, 4 * H), "b": (4 * H,),
                "Wo": (H, N_CLASSES), "bo": (N_CLASSES,)}
    return {"E": (s.vocab_rows, d), "Wc": (s.width * d, s.filters), "bc": (s.filters,),
            "Wo": (s.filters, N_CLASSES), "bo": (N_CLASSES,)}


def init_params(arch, shapes, rng, embeddings=None):
    params = {}
    for name, shape in param_shapes(arch, shapes).items():
        if name == "E":
            params[name] = (np.array(embeddings, dtype=np.float64) if embeddings is not None
                            else rng.uniform(-0.05, 0.05, size=shape))
            params[name][0] = 0.0
        elif len(shape) == 1:
            params[name] = np.zeros(shape)
        else:
            limit = np.sqrt(6.0 / (shape[0] + shape[1]))
            params[name] = rng.uniform(-limit, limit, size=shape)
    return params


def check_shapes(arch, params, width=None):
    arch = Arch(arch)
    E = params["E"]
    d = E.shape[1]
    if arch is Arch.CNN:
        F = params["Wc"].shape[1]
        width = params["Wc"].shape[0] // d if width is None else width
        expected = param_shapes(arch, Shapes(E.shape[0], d, filters=F, width=width))
    else:
        H = params["Wh"].shape[0]
        expected = param_shapes(arch, Shapes(E.shape[0], d, hidden=H))
    for name, shape in expected.items():
        if name not in params:
            raise ValueError(f"{arch.value}: missing parameter {name}")
        if params[name].shape != shape:
            raise ValueError(f"{arch.value}: parameter {name} has shape "
                             f"{params[name].shape}, expected {shape}")


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(probs, labels):
    picked = probs[np.arange(len(labels)), labels]
    return float(-np.mean(np.log(np.maximum(picked, 1e-300))))


def cnn_width(params):
    return params["Wc"].shape[0] // params["E"].shape[1]


def _embed(params, batch):
    ids = batch.token_ids
    mask = (np.arange(ids.shape[1])[None, :] < batch.lengths[:, None]).astype(np.float64)
    return params["E"][ids] * mask[:, :, None], mask


def _forward_rnn(params, batch):
    x, mask = _embed(params, batch)
    B, T, _ = x.shape
    H = params["Wh"].shape[0]
    hs = np.zeros((T + 1, B, H))
    new = np.zeros((T, B, H))
    for t in range(T):
        new[t] = np.tanh(x[:, t] @ params["Wx"] + hs[t] @ params["Wh"] + params["b"])
        m = mask[:, t:t + 1]
        hs[t + 1] = m * new[t] + (1.0 - m) * hs[t]
    return hs[T], {"x": x, "mask": mask, "hs": hs, "new": new}


def _forward_lstm(params, batch):
    x, mask = _embed(params, batch)
    B, T, _ = x.shape
    H = params["Wh"].shape[0]
    hs = np.zeros((T + 1, B, H))
    cs = np.zeros((T + 1, B, H))
    gates = np.zeros((T, B, 4 * H))
    c_new = np.zeros((T, B, H))
    for t in range(T):
        z = x[:, t] @ params["Wx"] + hs[t] @ params["Wh"] + params["b"]
        g = np.empty_like(z)
        g[:, :3 * H] = _sigmoid(z[:, :3 * H])
        g[:, 3 * H:] = np.tanh(z[:, 3 * H:])
        gates[t] = g
        i, f, o, cand = g[:, :H], g[:, H:2 * H], g[:, 2 * H:3 * H], g[:, 3 * H:]
        c_new[t] = f * cs[t] + i * cand
        h_new = o * np.tanh(c_new[t])
        m = mask[:, t:t + 1]
        cs[t + 1] = m * c_new[t] + (1.0 - m) * cs[t]
        hs[t + 1] = m * h_new + (1.0 - m) * hs[t]
    return hs[T], {"x": x, "mask": mask, "hs": hs, "cs": cs, "gates": gates, "c_new": c_new}


def _windows(x, width):
    B, T, d = x.shape
    P = T - width + 1
    return np.concatenate([x[:, k:k + P] for k in range(width)], axis=2)


def _forward_cnn(params, batch):
    width = cnn_width(params)
    x, mask = _embed(params, batch)
    win = _windows(x, width)                       # B x P x (width*d)
    conv = win @ params["Wc"] + params["bc"]       # B x P x F
    act = np.maximum(conv, 0.0)
    P = win.shape[1]
    last_start = np.maximum(batch.lengths - width, 0)
    valid = np.arange(P)[None, :] <= last_start[:, None]
    masked = np.where(valid[:, :, None], act, -np.inf)
    arg = masked.argmax(axis=1)                    # B x F
    pooled = np.take_along_axis(act, arg[:, None, :], axis=1)[:, 0, :]
    return pooled, {"x": x, "mask": mask, "win": win, "conv": conv, "arg": arg,
                    "ids": batch.token_ids}


_FORWARD = {Arch.RNN: _forward_rnn, Arch.LSTM: _forward_lstm, Arch.CNN: _forward_cnn}


def forward(arch, params, batch):
    """Class probabilities (B x 2) and the cache needed by :func:`backward`."""
    arch = Arch(arch)
    check_shapes(arch, params)
    batch = batch.trimmed(cnn_width(params) if arch is Arch.CNN else 1)
    features, cache = _FORWARD[arch](params, batch)
    logits = features @ params["Wo"] + params["bo"]
    probs = softmax(logits)
    cache.update(features=features, probs=probs, ids=cache.get("ids", batch.token_ids))
    return probs, cache


def loss(arch, params, batch):
    probs, _ = forward(arch, params, batch)
    return cross_entropy(probs, batch.labels)


def _scatter_embeddings(params, ids, dx, mask):
    dE = np.zeros_like(params["E"])
    np.add.at(dE, ids.ravel(), (dx * mask[:, :, None]).reshape(-1, dx.shape[2]))
    dE[0] = 0.0
    return dE


def _backward_rnn(params, cache, dfeat, grads):
    x, mask, hs, new = cache["x"], cache["mask"], cache["hs"], cache["new"]
    T = x.shape[1]
    dh = dfeat
    dx = np.zeros_like(x)
    for t in reversed(range(T)):
        m = mask[:, t:t + 1]
        da = m * dh * (1.0 - new[t] ** 2)
        grads["Wx"] += x[:, t].T @ da
        grads["Wh"] += hs[t].T @ da
        grads["b"] += da.sum(axis=0)
        dx[:, t] = da @ params["Wx"].T
        dh = da @ params["Wh"].T + (1.0 - m) * dh
    return dx


def _backward_lstm(params, cache, dfeat, grads):
    x, mask, hs, cs = cache["x"], cache["mask"], cache["hs"], cache["cs"]
    gates, c_new = cache["gates"], cache["c_new"]
    T = x.shape[1]
    H = params["Wh"].shape[0]
    dh = dfeat
    dc = np.zeros_like(dfeat)
    dx = np.zeros_like(x)
    dz = np.empty((x.shape[0], 4 * H))
    for t in reversed(range(T)):
        m = mask[:, t:t + 1]
        g = gates[t]
        i, f, o, cand = g[:, :H], g[:, H:2 * H], g[:, 2 * H:3 * H], g[:, 3 * H:]
        tc = np.tanh(c_new[t])
        dh_new = m * dh
        dc_new = m * dc + dh_new * o * (1.0 - tc ** 2)
        dz[:, :H] = dc_new * cand * i * (1.0 - i)
        dz[:, H:2 * H] = dc_new * cs[t] * f * (1.0 - f)
        dz[:, 2 * H:3 * H] = dh_new * tc * o * (1.0 - o)
        dz[:, 3 * H:] = dc_new * i * (1.0 - cand ** 2)
        grads["Wx"] += x[:, t].T @ dz
        grads["Wh"] += hs[t].T @ dz
        grads["b"] += dz.sum(axis=0)
        dx[:, t] = dz @ params["Wx"].T
        dh = dz @ params["Wh"].T + (1.0 - m) * dh
        dc = dc_new * f + (1.0 - m) * dc
    return dx


def _backward_cnn(params, cache, dfeat, grads):
    win, conv, arg, x = cache["win"], cache["conv"], cache["arg"], cache["x"]
    B, P, _ = win.shape
    F = conv.shape[2]
    d = x.shape[2]
    width = win.shape[2] // d
    dconv = np.zeros_like(conv)
    rows = np.arange(B)[:, None]
    cols = np.arange(F)[None, :]
    chosen = conv[rows, arg, cols]
    dconv[rows, arg, cols] = dfeat * (chosen > 0.0)
    grads["Wc"] += win.reshape(B * P, -1).T @ dconv.reshape(B * P, F)
    grads["bc"] += dconv.sum(axis=(0, 1))
    dwin = dconv @ params["Wc"].T                 # B x P x (width*d)
    dx = np.zeros_like(x)
    for k in range(width):
        dx[:, k:k + P] += dwin[:, :, k * d:(k + 1) * d]
    return dx


_BACKWARD = {Arch.RNN: _backward_rnn, Arch.LSTM: _backward_lstm, Arch.CNN: _backward_cnn}


def backward(arch, params, cache, labels, freeze_embeddings=False):
    """Gradients of the mean cross-entropy with respect to every parameter."""
    arch = Arch(arch)
    probs = cache["probs"]
    B = len(labels)
    dlogits = probs.copy()
    dlogits[np.arange(B), labels] -= 1.0
    dlogits /= B
    grads = {k: np.zeros_like(v) for k, v in params.items() if k != "E"}
    grads["Wo"] = cache["features"].T @ dlogits
    grads["bo"] = dlogits.sum(axis=0)
    dfeat = dlogits @ params["Wo"].T
    dx = _BACKWARD[arch](params, cache, dfeat, grads)
    if not freeze_embeddings:
        grads["E"] = _scatter_embeddings(params, cache["ids"], dx, cache["mask"])
    return grads


def predict_codes(arch, params, batch, batch_size=256):
    out = []
    for start in range(0, len(batch), batch_size):
        probs, _ = forward(arch, params, batch.subset(np.arange(start, min(start + batch_size,
                                                                            len(batch)))))
        out.append(probs.argmax(axis=1))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)
