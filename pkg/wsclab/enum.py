# -*- coding: utf-8 -*-
from enum import Enum


class ErrorCode(Enum):
    UNKNOWN_ERROR = "UNKNOWN_ERROR"
    CONFIGURATION_ERROR = "CONFIGURATION_ERROR"
    SHAPE_ERROR = "SHAPE_ERROR"
    DOMAIN_ERROR = "DOMAIN_ERROR"
    FORMAT_ERROR = "FORMAT_ERROR"
    CONTRACT_VIOLATION = "CONTRACT_VIOLATION"
    REPORT_ERROR = "REPORT_ERROR"


class Activation(str, Enum):
    RELU = "relu"


class InitScheme(str, Enum):
    KAIMING_UNIFORM = "kaiming_uniform"


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAM = "adam"


class SamplingMode(str, Enum):
    POOLED = "pooled"
    EXPLICIT = "explicit"


class AvgCountMode(str, Enum):
    PAPER = "paper"
    SNAPSHOTS = "snapshots"


class ResetFrequency(str, Enum):
    ONCE = "once"
    EVERY_EPOCH = "every_epoch"
    EVERY_ITERATION = "every_iteration"


class ImportanceMetric(str, Enum):
    MOMENT = "moment"
    PARAM_DRIFT = "param_drift"
    FISHER = "fisher"
    HESSIAN_HUTCHINSON = "hessian_hutchinson"
    FIRST_MOMENT_ONLY = "first_moment_only"
    SECOND_MOMENT_ONLY = "second_moment_only"
    INTRA_TASK_DRIFT = "intra_task_drift"
    INTER_TASK_DRIFT = "inter_task_drift"


class ResetStrategy(str, Enum):
    SOFT_BLEND = "soft_blend"
    RANDOM_REINIT = "random_reinit"
    REVERT = "revert"
    SHRINK_PERTURB = "shrink_perturb"
    CONTINUAL_BACKPROP = "continual_backprop"


class RankingScope(str, Enum):
    GLOBAL = "global"
    PER_LAYER = "per_layer"


class Method(str, Enum):
    WSC = "wsc"
    REPLAY = "replay"
    SCRATCH = "scratch"


class StreamSource(str, Enum):
    SYNTHETIC = "synthetic"
    IDX = "idx"
    FILE = "file"
