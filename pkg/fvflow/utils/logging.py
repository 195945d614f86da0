import os
import time
from pprint import pformat

LOGFILE = None
TIME_STACK = []


def init_logging(name=None, root='./logs'):
    """
    Creates a run directory under `root` with an empty log.txt file, which
    receives every later call to `log()`.
    :param name: custom name for the run directory (default \"%Y-%m-%d-%H-%M-%S\")
    :param root: parent folder of all run directories;
    :return: string, the path to the run directory
    """
    global LOGFILE
    if name is None:
        name = time.strftime("%Y-%m-%d-%H-%M-%S")
    log_dir = os.path.join(root, name)
    os.makedirs(log_dir, exist_ok=True)
    LOGFILE = os.path.join(log_dir, 'log.txt')
    open(LOGFILE, 'a').close()
    return log_dir


def close_logging():
    """
    Stops writing to the current logfile (messages are still printed).
    """
    global LOGFILE
    LOGFILE = None


def _to_str(message):
    if isinstance(message, dict):
        return pformat(message)
    if hasattr(message, 'to_string'):
        # pd.DataFrame
        return message.to_string(index=False, float_format='{:.6g}'.format)
    return str(message)


def log(message, print_string=True):
    """
    Prints a message to stdout and writes it to the logfile (requires user to
    call init_logging() at least once in order to save to file).
    Dicts are pretty-printed and DataFrames are written as aligned tables.
    :param message: the object to log;
    :param print_string: whether to print the string to stdout;
    """
    message = _to_str(message)
    if print_string:
        print(message)
    if not message.endswith('\n'):
        message += '\n'
    if LOGFILE:
        with open(LOGFILE, 'a') as f:
            f.write(message)


def tic(message=None, print_string=True):
    """
    Start counting time.
    :param message: additional message to print;
    :param print_string: whether to print the string to stdout;
    """
    TIME_STACK.append(time.time())
    if message:
        log(message, print_string=print_string)


def toc(message=None, print_string=True):
    """
    Stop counting time.
    :param message: additional message to print;
    :param print_string: whether to print the string to stdout;
    :return: the elapsed time in seconds, or None if tic() was never called.
    """
    try:
        elapsed = time.time() - TIME_STACK.pop()
    except IndexError:
        print("You have to tic() before you toc()\n")
        return None
    output = 'Elapsed: {:.2f}s'.format(elapsed)
    if message:
        output = str(message) + '\n' + output
    log(output, print_string=print_string)
    return elapsed
