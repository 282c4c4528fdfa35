"""Cycle-graph nonlocal games: input sets, referees and the quantum player."""
from .bell import bell_operator_terms, bell_success_probability
from .inputs import InputKind, InputSet, build_input_set
from .player import PlayResult, RoundRecord, SuccessEstimate, play_quantum
from .referee import GameInstance, GameKind, cbf_local_inputs, cbf_referee, ss_referee

__all__ = [
    "GameInstance",
    "GameKind",
    "InputKind",
    "InputSet",
    "PlayResult",
    "RoundRecord",
    "SuccessEstimate",
    "bell_operator_terms",
    "bell_success_probability",
    "build_input_set",
    "cbf_local_inputs",
    "cbf_referee",
    "play_quantum",
    "ss_referee",
]
