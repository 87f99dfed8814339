# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import datetime
import json
import logging
import math
import time
from collections import defaultdict, deque
from typing import Dict, Iterable, Iterator, Optional

import numpy as np

logger = logging.getLogger("pipereuse")


class SmoothedValue:
    """Running statistics of a scalar series: windowed median plus global mean and max."""

    def __init__(self, window_size: int = 20, fmt: Optional[str] = None):
        self.window = deque(maxlen=window_size)
        self.total = 0.0
        self.count = 0
        self.peak = -math.inf
        self.fmt = fmt or "{median:.4f} ({global_avg:.4f})"

    def update(self, value: float) -> None:
        value = float(value)
        self.window.append(value)
        self.total += value
        self.count += 1
        self.peak = max(self.peak, value)

    @property
    def median(self) -> float:
        return float(np.median(self.window)) if self.window else math.nan

    @property
    def global_avg(self) -> float:
        return self.total / self.count if self.count else math.nan

    @property
    def max(self) -> float:
        return self.peak

    @property
    def value(self) -> float:
        return self.window[-1] if self.window else math.nan

    def __str__(self):
        return self.fmt.format(median=self.median, global_avg=self.global_avg, max=self.max, value=self.value)


class MetricLogger:
    """Progress of a capacity sweep.

    Every sweep point updates one meter per reported quantity (best speedup,
    per-policy speedups). A progress line with an ETA is logged after each
    point and, with ``output_file``, appended as a JSON record.
    """

    def __init__(self, delimiter: str = "  ", output_file: Optional[str] = None):
        self.meters: Dict[str, SmoothedValue] = defaultdict(lambda: SmoothedValue(fmt="{value:.4f}"))
        self.delimiter = delimiter
        self.output_file = output_file

    def update(self, **kwargs) -> None:
        for name, value in kwargs.items():
            if isinstance(value, np.generic):
                value = value.item()
            if not isinstance(value, (float, int)):
                raise TypeError(f"Meter {name} expects a number, got {type(value).__name__}")
            if math.isnan(value):
                continue
            self.meters[name].update(value)

    def __getattr__(self, attr):
        meters = self.__dict__.get("meters", {})
        if attr in meters:
            return meters[attr]
        raise AttributeError(f"'{type(self).__name__}' object has no attribute '{attr}'")

    def __str__(self):
        return self.delimiter.join(f"{name}: {meter}" for name, meter in self.meters.items())

    def _dump(self, index: int, point, elapsed: float) -> None:
        if self.output_file is None:
            return
        record = {"index": index, "point": point, "elapsed": elapsed}
        record.update({name: meter.value for name, meter in self.meters.items()})
        with open(self.output_file, "a") as f:
            f.write(json.dumps(record) + "\n")

    def log_every(self, iterable: Iterable, print_freq: int = 1, header: str = "") -> Iterator:
        points = list(iterable)
        total = len(points)
        width = len(str(total))
        start = time.time()
        for index, point in enumerate(points):
            yield point
            elapsed = time.time() - start
            if index % print_freq == 0 or index == total - 1:
                self._dump(index, point, elapsed)
                eta = datetime.timedelta(seconds=int(elapsed / (index + 1) * (total - index - 1)))
                parts = (header, f"[{index:{width}d}/{total}]", f"point: {point}", str(self), f"eta: {eta}")
                logger.info(self.delimiter.join(part for part in parts if part))
        total_time = time.time() - start
        logger.info(f"{header} total time: {datetime.timedelta(seconds=int(total_time))} ({total} points)")
