"""
Utility functions for the hexagonator CLI.
"""

import time

DEBUG = False


def sync_debug_with_state(state):
    """Sync the cached DEBUG value with the state."""
    global DEBUG
    DEBUG = state.get_variable("DEBUG")


def debug_print(*msg):
    """Print debug messages if DEBUG is enabled."""
    if DEBUG and len(msg) == 1:
        print(f"DEBUG: {msg[0]}")
    elif DEBUG and len(msg) > 1:
        print("DEBUG:", " ".join(str(m) for m in msg))


def set_debug(enabled, state):
    """Set the global debug flag."""
    state.set_variable("DEBUG", "true" if enabled else "false")
    sync_debug_with_state(state)
    if DEBUG:
        debug_print(f"Debugging is {'enabled' if enabled else 'disabled'}")


def time_execution(label, func, *args, **kwargs):
    """Run ``func`` and report how long it took through :func:`debug_print`."""
    start = time.perf_counter()
    result = func(*args, **kwargs)
    elapsed_ms = (time.perf_counter() - start) * 1000
    debug_print(f"⏱️  {label} completed in {elapsed_ms:.2f} ms")
    return result


def format_complex(value, digits=10):
    """Compact rendering of a complex number for console tables."""
    value = complex(value)
    if abs(value.imag) < 10 ** (-digits):
        return f"{value.real:.{digits}g}"
    if abs(value.real) < 10 ** (-digits):
        return f"{value.imag:.{digits}g}i"
    sign = "+" if value.imag >= 0 else "-"
    return f"{value.real:.{digits}g}{sign}{abs(value.imag):.{digits}g}i"
