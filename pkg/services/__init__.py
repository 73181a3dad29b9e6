"""Command runners behind the CLI."""
from services.experiments import COMMANDS, CommandResult, run_command
