from rich.console import Console

# Reports may go to stdout, so messages and progress use stderr
console = Console(stderr=True)
