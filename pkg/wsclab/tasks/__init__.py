from .buffer import ReplayBuffer, buffer_update, build_buffer, memory_ratio, select_exemplars, task_weights
from .codec import STREAM_HEADER, dump_stream, load_stream, load_stream_file, save_stream_file
from .idx import load_idx_stream, parse_idx, read_idx
from .sampling import iterate_epoch, pooled_examples, realized_alpha, sample_hybrid_batch, steps_per_epoch
from .stream import ExampleSet, LabeledExample, TaskSpec, TaskStream
from .synthetic import gen_synthetic_stream

__all__ = [
    "STREAM_HEADER",
    "ExampleSet",
    "LabeledExample",
    "ReplayBuffer",
    "TaskSpec",
    "TaskStream",
    "buffer_update",
    "build_buffer",
    "dump_stream",
    "gen_synthetic_stream",
    "iterate_epoch",
    "load_idx_stream",
    "load_stream",
    "load_stream_file",
    "memory_ratio",
    "parse_idx",
    "pooled_examples",
    "read_idx",
    "realized_alpha",
    "sample_hybrid_batch",
    "save_stream_file",
    "select_exemplars",
    "steps_per_epoch",
    "task_weights",
]
