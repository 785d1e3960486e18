"""Sequence classifier for grasp episodes: a small LSTM written on numpy.

One recurrent layer reads the normalized temperature trace one sample at a
time; the last hidden state feeds a linear softmax readout.  Training is
mini-batch gradient descent on cross-entropy with classical momentum,
weight decay and a geometric learning-rate schedule; backpropagation
through time is spelled out explicitly so the gradients can be verified
against finite differences.

A nearest-centroid classifier over raw traces is included as an independent
sanity baseline: with the synthetic noise model it is a strong reference
point any trained network should approach.
"""

import dataclasses
import struct

import numpy as np

from .episodes import Dataset
from .traces import TemperatureTrace


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite during training."""


class CheckpointFormatError(ValueError):
    """Raised for unreadable or malformed model checkpoint files."""


@dataclasses.dataclass
class TrainConfig:
    hidden_size: int = 32
    epochs: int = 2000
    batch_size: int = 100
    learning_rate: float = 0.05
    lr_decay: float = 0.02      # lr multiplier reached at the final epoch
    momentum: float = 0.9       # classical heavy-ball coefficient
    weight_decay: float = 1.0e-4
    clip_norm: float = 5.0      # global gradient-norm ceiling
    seed: int = 0

    def __post_init__(self):
        if self.hidden_size < 1 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("hidden_size, epochs and batch_size must be >= 1")
        if not self.learning_rate > 0.0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError(f"lr_decay must be in (0, 1], got {self.lr_decay}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.weight_decay < 0.0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if not self.clip_norm > 0.0:
            raise ValueError(f"clip_norm must be > 0, got {self.clip_norm}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


class LstmModel:
    """Single-layer LSTM with a softmax readout over the final hidden state.

    Gate pre-activations are computed in one fused matrix product; columns
    of W are ordered (input, forget, cell, output).  Inputs are scalar
    temperature samples normalized with dataset statistics stored on the
    model, so a checkpoint is self-contained.
    """

    def __init__(self, hidden_size: int, n_classes: int, rng=None,
                 input_size: int = 1):
        if hidden_size < 1 or n_classes < 2 or input_size < 1:
            raise ValueError("need hidden_size >= 1, n_classes >= 2, input_size >= 1")
        self.hidden_size = hidden_size
        self.n_classes = n_classes
        self.input_size = input_size
        if rng is None:
            rng = np.random.default_rng(0)
        k = 1.0 / np.sqrt(hidden_size)
        h = hidden_size
        self.W = rng.uniform(-k, k, (input_size + h, 4 * h))
        self.b = np.zeros(4 * h)
        # start the forget gates nearly open (sigmoid(3) ~ 0.95, a memory of
        # tens of samples) so the fresh cell already integrates across the
        # trace; with the default bias 0 it forgets in ~2 steps and training
        # must first discover integration before it can separate classes
        self.b[h:2 * h] = 3.0
        self.Wy = rng.uniform(-k, k, (h, n_classes))
        self.by = np.zeros(n_classes)
        self.norm_mean = 0.0
        self.norm_std = 1.0

    def parameters(self):
        return [self.W, self.b, self.Wy, self.by]

    def normalize(self, batch: np.ndarray) -> np.ndarray:
        return (np.asarray(batch, dtype=float) - self.norm_mean) / self.norm_std


def _sigmoid(x):
    # split by sign so exp never sees a large positive argument
    out = np.empty_like(x)
    pos = x >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _scan(model: LstmModel, xn: np.ndarray, keep_cache: bool):
    """Run the recurrence over a normalized batch (B, T). Returns h_T and caches."""
    B, T = xn.shape
    H = model.hidden_size
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    cache = [] if keep_cache else None
    for t in range(T):
        z = np.empty((B, 1 + H))
        z[:, 0] = xn[:, t]
        z[:, 1:] = h
        pre = z @ model.W + model.b
        i = _sigmoid(pre[:, :H])
        f = _sigmoid(pre[:, H:2 * H])
        g = np.tanh(pre[:, 2 * H:3 * H])
        o = _sigmoid(pre[:, 3 * H:])
        c_prev = c
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        if keep_cache:
            cache.append((z, i, f, g, o, c_prev, tc))
    return h, cache


def forward(model: LstmModel, batch: np.ndarray) -> np.ndarray:
    """Class probabilities for a batch of raw traces, shape (B, n_classes)."""
    batch = np.atleast_2d(np.asarray(batch, dtype=float))
    h, _ = _scan(model, model.normalize(batch), keep_cache=False)
    return _softmax(h @ model.Wy + model.by)


def _loss_and_grads(model: LstmModel, xn: np.ndarray, y: np.ndarray,
                    loss_scale: float = 1.0):
    """Mean cross-entropy over a normalized batch and its parameter gradients."""
    B, T = xn.shape
    H = model.hidden_size
    h_T, cache = _scan(model, xn, keep_cache=True)
    logits = h_T @ model.Wy + model.by
    probs = _softmax(logits)
    picked = probs[np.arange(B), y]
    with np.errstate(divide="ignore"):  # log(0) = -inf is caught by train()
        loss = -np.mean(np.log(picked)) * loss_scale

    dlogits = probs.copy()
    dlogits[np.arange(B), y] -= 1.0
    dlogits *= loss_scale / B
    dWy = h_T.T @ dlogits
    dby = dlogits.sum(axis=0)
    dh = dlogits @ model.Wy.T
    dc = np.zeros_like(dh)
    dW = np.zeros_like(model.W)
    db = np.zeros_like(model.b)
    for t in range(T - 1, -1, -1):
        z, i, f, g, o, c_prev, tc = cache[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dpre = np.empty((B, 4 * H))
        dpre[:, :H] = di * i * (1.0 - i)
        dpre[:, H:2 * H] = df * f * (1.0 - f)
        dpre[:, 2 * H:3 * H] = dg * (1.0 - g * g)
        dpre[:, 3 * H:] = do * o * (1.0 - o)
        dW += z.T @ dpre
        db += dpre.sum(axis=0)
        dz = dpre @ model.W.T
        dh = dz[:, 1:]
        dc = dc * f
    return loss, [dW, db, dWy, dby]


def _stack(traces: list[TemperatureTrace]) -> np.ndarray:
    lengths = {t.samples.size for t in traces}
    if len(lengths) != 1:
        raise ValueError(f"traces have mixed lengths {sorted(lengths)}; "
                         "a dataset must be uniformly sampled")
    return np.stack([t.samples for t in traces])


def train(dataset: Dataset, config: TrainConfig) -> tuple[LstmModel, list[float]]:
    """Fit an LSTM on the training split; returns (model, per-epoch loss history).

    Deterministic in config.seed: initialization and epoch shuffles come from
    one generator, so equal seeds give identical parameters and predictions.
    Raises TrainingDivergedError if the loss leaves the finite range.
    """
    if not dataset.train:
        raise ValueError("dataset has no training traces")
    X = _stack(dataset.train)
    y = dataset.label_indices(dataset.train)
    rng = np.random.default_rng(config.seed)
    model = LstmModel(config.hidden_size, len(dataset.class_names), rng=rng)
    model.norm_mean = float(X.mean())
    std = float(X.std())
    model.norm_std = std if std > 0.0 else 1.0
    xn = model.normalize(X)

    n = xn.shape[0]
    history: list[float] = []
    params = model.parameters()
    velocity = [np.zeros_like(p) for p in params]
    # geometric learning-rate schedule: epoch 0 runs at learning_rate and
    # the last epoch at learning_rate * lr_decay, so early epochs move fast
    # and late ones settle the decision boundary instead of bouncing on it
    rate = (config.lr_decay ** (1.0 / (config.epochs - 1))
            if config.epochs > 1 else 1.0)
    lr = config.learning_rate
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, config.batch_size):
            idx = order[lo:lo + config.batch_size]
            loss, grads = _loss_and_grads(model, xn[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}: {loss}")
            total += loss * idx.size
            gnorm = np.sqrt(sum(float(np.sum(g * g)) for g in grads))
            scale = 1.0
            if gnorm > config.clip_norm:
                scale = config.clip_norm / gnorm
            for p, g, v in zip(params, grads, velocity):
                v *= config.momentum
                v += scale * g + config.weight_decay * p
                p -= lr * v
        history.append(float(total) / n)
        lr *= rate
    return model, history


def gradient_check(model: LstmModel, batch: np.ndarray, labels: np.ndarray,
                   step: float = 1.0e-5) -> float:
    """Compare analytic BPTT gradients with central differences.

    Returns the worst relative discrepancy over every parameter entry.
    Intended for small models (hidden_size <= 8, short traces); cost grows
    with parameter count times sequence length.
    """
    xn = model.normalize(np.atleast_2d(batch))
    labels = np.asarray(labels, dtype=int)
    _, grads = _loss_and_grads(model, xn, labels)
    worst = 0.0
    for param, grad in zip(model.parameters(), grads):
        flat = param.reshape(-1)
        gflat = grad.reshape(-1)
        for j in range(flat.size):
            keep = flat[j]
            flat[j] = keep + step
            lp, _ = _loss_and_grads(model, xn, labels)
            flat[j] = keep - step
            lm, _ = _loss_and_grads(model, xn, labels)
            flat[j] = keep
            fd = (lp - lm) / (2.0 * step)
            rel = abs(fd - gflat[j]) / (abs(fd) + abs(gflat[j]) + 1.0e-12)
            worst = max(worst, rel)
    return worst


@dataclasses.dataclass
class ConfusionMatrix:
    """Counts[i, j] = traces of true class i predicted as class j."""

    class_names: list[str]
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=int)
        c = len(self.class_names)
        if self.counts.shape != (c, c):
            raise ValueError(f"counts shape {self.counts.shape} does not match "
                             f"{c} classes")
        if (self.counts < 0).any():
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.total

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("true\\predicted," + ",".join(self.class_names) + "\n")
            for name, row in zip(self.class_names, self.counts):
                fh.write(name + "," + ",".join(str(v) for v in row) + "\n")


def predict(model: LstmModel, traces: list[TemperatureTrace]) -> np.ndarray:
    return np.argmax(forward(model, _stack(traces)), axis=1)


def confusion_from_predictions(true_idx, pred_idx, class_names) -> ConfusionMatrix:
    c = len(class_names)
    counts = np.zeros((c, c), dtype=int)
    for t, p in zip(true_idx, pred_idx):
        counts[t, p] += 1
    return ConfusionMatrix(class_names=list(class_names), counts=counts)


def evaluate(model: LstmModel, dataset: Dataset) -> ConfusionMatrix:
    """Confusion matrix of the model over the dataset's test split."""
    if not dataset.test:
        raise ValueError("dataset has no test traces")
    true_idx = dataset.label_indices(dataset.test)
    pred_idx = predict(model, dataset.test)
    return confusion_from_predictions(true_idx, pred_idx, dataset.class_names)


def nearest_centroid_classify(train: list[TemperatureTrace],
                              test: list[TemperatureTrace],
                              class_names: list[str] | None = None
                              ) -> ConfusionMatrix:
    """Assign each test trace to the nearest train-split class mean.

    Plain Euclidean distance on raw samples; no fitting beyond the means.
    """
    if not train or not test:
        raise ValueError("need non-empty train and test trace lists")
    if class_names is None:
        class_names = []
        for t in train:
            if t.label not in class_names:
                class_names.append(t.label)
    lookup = {name: i for i, name in enumerate(class_names)}
    X = _stack(train)
    centroids = np.stack([
        X[[lookup[t.label] == ci for t in train]].mean(axis=0)
        for ci in range(len(class_names))])
    Xt = _stack(test)
    d2 = ((Xt[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    pred = np.argmin(d2, axis=1)
    true = np.array([lookup[t.label] for t in test])
    return confusion_from_predictions(true, pred, class_names)


# ---------------------------------------------------------------------------
# checkpoint file format, version 1 (binary, little-endian)
#
#   offset 0   8 bytes   magic b"TTLSTM01"
#   offset 8   3 uint32  hidden_size, input_size, n_classes
#   offset 20  2 float64 norm_mean, norm_std
#   offset 36  float64[] W    row-major, (input_size+hidden, 4*hidden)
#   ...        float64[] b    (4*hidden,)
#   ...        float64[] Wy   row-major, (hidden, n_classes)
#   ...        float64[] by   (n_classes,)

CHECKPOINT_MAGIC = b"TTLSTM01"


def save_model(model: LstmModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<III", model.hidden_size, model.input_size,
                             model.n_classes))
        fh.write(struct.pack("<dd", model.norm_mean, model.norm_std))
        for p in model.parameters():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_model(path) -> LstmModel:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise CheckpointFormatError(f"cannot read checkpoint {path}: {exc}") from None
    if len(blob) < 36 or blob[:8] != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(
            f"{path}: not a thermotouch checkpoint (bad or missing magic)")
    hidden, input_size, n_classes = struct.unpack_from("<III", blob, 8)
    mean, std = struct.unpack_from("<dd", blob, 20)
    shapes = [(input_size + hidden, 4 * hidden), (4 * hidden,),
              (hidden, n_classes), (n_classes,)]
    expected = 36 + 8 * sum(int(np.prod(s)) for s in shapes)
    if len(blob) != expected:
        raise CheckpointFormatError(
            f"{path}: checkpoint is {len(blob)} bytes, header implies {expected}")
    model = LstmModel(hidden, n_classes, input_size=input_size)
    model.norm_mean = mean
    model.norm_std = std
    offset = 36
    arrays = []
    for shape in shapes:
        count = int(np.prod(shape))
        arrays.append(np.frombuffer(blob, dtype="<f8", count=count,
                                    offset=offset).reshape(shape).copy())
        offset += 8 * count
    model.W, model.b, model.Wy, model.by = arrays
    return model
