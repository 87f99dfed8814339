# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

"""Linear program of the cache schedule.

Variables, with j the node index in ``IlpInstance.node_ids`` and t the step:

- ``x_j_t`` binary: node j resident after the actions of step t;
- ``d_j_t`` integer: change of node j at step t, in [0, 1] for j = i_t and in
  [-1, 0] otherwise;
- ``z_t`` continuous >= 0: step t is computed.

Constraints: ``x_j_t - x_j_(t-1) - d_j_t = 0`` (with x_j_(-1) = 0),
``sum_j m_j x_j_t <= M`` and ``z_t + sum_(j in A_t) x_j_(t-1) >= 1``.
The objective ``sum_t c_t z_t`` is minimized.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from docplex.mp.model import Model
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .instance import IlpInstance

logger = logging.getLogger("pipereuse")


@dataclass
class MilpModel:
    names: List[str]
    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integrality: np.ndarray
    matrix: sparse.csr_matrix
    row_lower: np.ndarray
    row_upper: np.ndarray
    row_names: List[str]

    @property
    def variable_count(self) -> int:
        return len(self.names)

    def count(self, prefix: str) -> int:
        return sum(1 for name in self.names if name.startswith(prefix))


@dataclass
class MilpSolution:
    status: int
    message: str
    cost: Optional[float]
    values: Optional[np.ndarray]


def build_model(instance: IlpInstance) -> MilpModel:
    n, T = instance.n, instance.T

    def x(j, t):
        return j * T + t

    def d(j, t):
        return n * T + j * T + t

    def z(t):
        return 2 * n * T + t

    size = 2 * n * T + T

    names = [f"x_{j}_{t}" for j in range(n) for t in range(T)]
    names += [f"d_{j}_{t}" for j in range(n) for t in range(T)]
    names += [f"z_{t}" for t in range(T)]

    lower = np.zeros(size)
    upper = np.ones(size)
    upper[2 * n * T :] = np.inf
    integrality = np.ones(size, dtype=np.int64)
    integrality[2 * n * T :] = 0
    for j in range(n):
        for t in range(T):
            if instance.sequence[t] != j:
                lower[d(j, t)] = -1.0
                upper[d(j, t)] = 0.0

    objective = np.zeros(size)
    objective[2 * n * T :] = instance.costs

    rows, cols, vals = [], [], []
    row_lower, row_upper, row_names = [], [], []

    def add_row(name, entries, lo, hi):
        r = len(row_names)
        for col, val in entries:
            rows.append(r)
            cols.append(col)
            vals.append(val)
        row_lower.append(lo)
        row_upper.append(hi)
        row_names.append(name)

    for j in range(n):
        for t in range(T):
            entries = [(x(j, t), 1.0), (d(j, t), -1.0)]
            if t > 0:
                entries.append((x(j, t - 1), -1.0))
            add_row(f"state_{j}_{t}", entries, 0.0, 0.0)
    for t in range(T):
        add_row(f"capacity_{t}", [(x(j, t), float(instance.sizes[j])) for j in range(n)], -np.inf, instance.capacity)
    for t in range(T):
        entries = [(z(t), 1.0)]
        if t > 0:
            entries += [(x(j, t - 1), 1.0) for j in instance.active[t]]
        add_row(f"cover_{t}", entries, 1.0, np.inf)

    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(len(row_names), size))
    return MilpModel(
        names=names,
        objective=objective,
        lower=lower,
        upper=upper,
        integrality=integrality,
        matrix=matrix,
        row_lower=np.array(row_lower),
        row_upper=np.array(row_upper),
        row_names=row_names,
    )


def export_milp(instance: IlpInstance, name: str = "cache_schedule") -> str:
    """The program in CPLEX LP format."""
    model = build_model(instance)
    mdl = Model(name=name)
    variables = []
    for k, var_name in enumerate(model.names):
        if var_name.startswith("x_"):
            variables.append(mdl.binary_var(name=var_name))
        elif var_name.startswith("d_"):
            variables.append(mdl.integer_var(lb=model.lower[k], ub=model.upper[k], name=var_name))
        else:
            variables.append(mdl.continuous_var(lb=0, name=var_name))

    coo = model.matrix.tocoo()
    terms = [[] for _ in model.row_names]
    for r, c, v in zip(coo.row, coo.col, coo.data):
        terms[r].append(v * variables[c])
    for r, row_name in enumerate(model.row_names):
        expr = mdl.sum(terms[r])
        lo, hi = model.row_lower[r], model.row_upper[r]
        if lo == hi:
            mdl.add_constraint(expr == lo, ctname=row_name)
        elif np.isinf(lo):
            mdl.add_constraint(expr <= hi, ctname=row_name)
        else:
            mdl.add_constraint(expr >= lo, ctname=row_name)
    mdl.minimize(mdl.sum(float(c) * variables[k] for k, c in enumerate(model.objective) if c))
    return mdl.export_as_lp_string()


def solve_milp(instance: IlpInstance, time_limit: Optional[float] = None) -> MilpSolution:
    """Solve the program with the HiGHS backend of SciPy."""
    model = build_model(instance)
    options = {"time_limit": time_limit} if time_limit is not None else {}
    result = milp(
        c=model.objective,
        constraints=LinearConstraint(model.matrix, model.row_lower, model.row_upper),
        integrality=model.integrality,
        bounds=Bounds(model.lower, model.upper),
        options=options,
    )
    if result.x is None:
        logger.warning(f"solve_milp: no solution ({result.message})")
        return MilpSolution(result.status, result.message, None, None)
    return MilpSolution(result.status, result.message, float(result.fun), result.x)


def step_indicators(instance: IlpInstance, values: np.ndarray) -> np.ndarray:
    """z_t read back from a solution vector."""
    return values[2 * instance.n * instance.T :]


def resident_matrix(instance: IlpInstance, values: np.ndarray) -> np.ndarray:
    """X as an (n, T) 0/1 matrix from a solution vector."""
    return np.rint(values[: instance.n * instance.T]).reshape(instance.n, instance.T).astype(int)
