import sys
import threading
import time


class Spinner:
    """Console spinner shown while a numeric run is in progress.

    Usable as ``with Spinner("🔄 Integrating..."):``; it stays silent when
    ``enabled`` is false so debug output is not interleaved with it.
    """

    frames = ["⠋", "⠙", "⠹", "⠸", "⠼", "⠴", "⠦", "⠧", "⠇", "⠏"]

    def __init__(self, message="🔄 Working... ", delay=0.1, enabled=True, stream=None):
        self.message = message
        self.delay = delay
        self.enabled = enabled
        self.stream = stream or sys.stdout
        self._stop = threading.Event()
        self._thread = None

    def _spin(self):
        idx = 0
        self.stream.write(self.message)
        self.stream.flush()
        while not self._stop.is_set():
            self.stream.write(self.frames[idx % len(self.frames)])
            self.stream.flush()
            time.sleep(self.delay)
            self.stream.write("\b")
            idx += 1
        self.stream.write(" " * (len(self.message) + 1) + "\r")
        self.stream.flush()

    def start(self):
        if not self.enabled or self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._spin, daemon=True)
        self._thread.start()

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
            self._thread = None

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.stop()
        return False
