from src.simulation.engine import (
    TERMINAL, advance, apply_agent_events, enabled_actions, horizon_bound, initial_state,
    is_terminal, makespan, next_decision_time, settle_to_decision,
)
from src.simulation.events import CandidateAction, Event, EventKind, priority
from src.simulation.state import SimState
from src.simulation.transitions import apply_event
