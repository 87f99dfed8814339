# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

"""Exception hierarchy shared by every pipereuse package."""


class PipeReuseError(Exception):
    exit_code = 1


class ConfigurationError(PipeReuseError):
    """Invalid user input: bad config, missing cost, unresolvable workload."""

    exit_code = 2


class ContractViolation(PipeReuseError):
    """A user supplied callable broke its contract."""

    exit_code = 3


class PolicyContractError(ContractViolation):
    pass


class StructuralError(PipeReuseError):
    """The DAG does not have the shape an operation needs."""

    exit_code = 2


class UndefinedRatioError(PipeReuseError):
    exit_code = 2


class GridOverflowError(ConfigurationError):
    pass


class ConsistencyError(ConfigurationError):
    pass


class ProfileError(ConfigurationError):
    def __init__(self, record, message: str):
        self.record = record
        super().__init__(f"profile record {record!r}: {message}")
