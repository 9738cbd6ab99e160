"""
Nullability module.
Decides whether the empty word belongs to an expression, under a nullability environment.
"""

from typing import Dict, Mapping, Optional, Set

from pderiv.errors import UnboundVariableError
from pderiv.syntax import (
    ALT, CAT, EMPTY_SET, EMPTY_WORD, MU, STAR, SYM, VAR, Expr, VarId,
)

NullEnv = Mapping[VarId, bool]


def null(r: Expr, env: Optional[NullEnv] = None) -> bool:
    """
    Nullability of r.

    A binder is evaluated in one step: the body is tested with its own
    variable assumed non-nullable. The boolean lattice has height one, so
    this is already the least fixed point.

    Args:
        r: Expression with free_vars(r) covered by env
        env: Nullability of the free variables

    Returns:
        True iff the empty word is in the language of r
    """
    return _null(r, dict(env or {}))


def _null(r: Expr, env: Dict[VarId, bool]) -> bool:
    kind = r.kind
    if kind == EMPTY_WORD or kind == STAR:
        return True
    if kind == EMPTY_SET or kind == SYM:
        return False
    if kind == ALT:
        return _null(r.left, env) or _null(r.right, env)
    if kind == CAT:
        return _null(r.left, env) and _null(r.right, env)
    if kind == VAR:
        if r.var not in env:
            raise UnboundVariableError(r.var.name, "nullability environment")
        return env[r.var]
    # mu: one-step fixpoint
    return _null(r.body, {**env, r.var: False})


def nullability_fixpoint(r: Expr, env: Optional[NullEnv], x: VarId) -> bool:
    """
    Least fixed point of b -> null(r, env[x -> b]) by Kleene iteration from False.

    Only used to check that the one-step evaluation of binders is exact.
    """
    env = dict(env or {})
    value = False
    while True:
        following = null(r, {**env, x: value})
        if following == value:
            return value
        value = following


def agrees(env: NullEnv, languages: Mapping[VarId, Set[str]]) -> bool:
    """
    Whether a nullability environment agrees with a language environment.

    Args:
        env: Variable -> nullability
        languages: Variable -> set of words (a finite window of its language)

    Returns:
        True iff for every variable, "" is in its language exactly when env says nullable
    """
    if set(env) != set(languages):
        raise ValueError("nullability and language environments have different domains")
    return all(("" in languages[x]) == bool(env[x]) for x in env)
