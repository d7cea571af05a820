import logging
import sys

from tqdm import tqdm

LOG_FORMAT = "[%(levelname)s] %(message)s"


class TqdmLoggingHandler(logging.Handler):
    """Writes records through tqdm so they land above any progress bar on stderr."""

    def emit(self, record):
        try:
            tqdm.write(self.format(record), file=sys.stderr)
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            self.handleError(record)


def verbosity_to_level(verbosity):
    if verbosity >= 3:
        return logging.DEBUG
    if verbosity == 2:
        return logging.INFO
    return logging.WARNING


def init_logging(level=logging.INFO):
    root_logger = logging.getLogger(__name__.split(".")[0])
    root_logger.setLevel(level)
    for handler in list(root_logger.handlers):
        if isinstance(handler, TqdmLoggingHandler):
            root_logger.removeHandler(handler)
    console_handler = TqdmLoggingHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root_logger.addHandler(console_handler)
    return console_handler
