"""Wall-time and memory metrics collection for simulation runs."""

import json
import time
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Union

import psutil


@dataclass
class RunMetrics:
    """Data class for run performance metrics."""
    slots: int
    slots_per_second: float
    processing_time_seconds: float
    memory_usage_mb: float
    timestamp: str


class MetricsCollector:
    """Collects and tracks performance metrics during a simulation."""

    # Sampling RSS every slot is expensive; sample periodically
    MEMORY_SAMPLE_EVERY = 1000

    def __init__(self):
        self.start_time = None
        self.slots_processed = 0
        self.peak_memory_mb = 0.0

    def start_monitoring(self):
        """Start performance monitoring."""
        self.start_time = time.perf_counter()
        self.slots_processed = 0
        self.peak_memory_mb = self._get_memory_usage()

    def record_slot(self):
        """Record one simulated slot."""
        self.slots_processed += 1
        if self.slots_processed % self.MEMORY_SAMPLE_EVERY == 0:
            self._update_peak_memory()

    def get_metrics(self) -> RunMetrics:
        """Get current performance metrics."""
        if self.start_time is None:
            raise ValueError("Monitoring not started. Call start_monitoring() first.")

        self._update_peak_memory()
        elapsed_time = time.perf_counter() - self.start_time
        rate = self.slots_processed / elapsed_time if elapsed_time > 0 else 0.0

        return RunMetrics(
            slots=self.slots_processed,
            slots_per_second=round(rate, 1),
            processing_time_seconds=round(elapsed_time, 3),
            memory_usage_mb=round(self.peak_memory_mb, 1),
            timestamp=datetime.now().isoformat(),
        )

    def _update_peak_memory(self):
        current_memory = self._get_memory_usage()
        if current_memory > self.peak_memory_mb:
            self.peak_memory_mb = current_memory

    def _get_memory_usage(self) -> float:
        """Get current memory usage in MB."""
        process = psutil.Process()
        return process.memory_info().rss / 1024 / 1024


def save_run_metrics(metrics: RunMetrics, filepath: Union[str, Path]):
    """Save run metrics to JSON file."""
    with open(filepath, 'w') as f:
        json.dump(asdict(metrics), f, indent=2)


def load_run_metrics(filepath: Union[str, Path]) -> RunMetrics:
    """Load run metrics from JSON file."""
    with open(filepath, 'r') as f:
        data = json.load(f)
    return RunMetrics(**data)
