from .scheduler import SchedulerState, advance, dump_schedule, lr_at, on_validation, should_stop

__all__ = ["SchedulerState", "advance", "dump_schedule", "lr_at", "on_validation", "should_stop"]
