"""
vortexprox - command-line application
Vortex cycles, nerves, proximity relations and Leader topology on planar cell complexes

Setup Instructions:
1. Install dependencies: pip install -r requirements.txt
2. Run a command: python app.py validate data/fig1.json
3. List commands: python app.py --help

Architecture:
- Data models: models.py (frozen dataclasses, no database)
- Services: services/*_service.py
- Commands: commands.py
- Fixtures: data/*.json
"""
import logging
import sys

import click

from commands import register_commands
from config import LOG_LEVEL

# Setup logging - stderr only, reports go to stdout
logging.basicConfig(
    level=LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stderr)
    ]
)

logger = logging.getLogger(__name__)


def create_app() -> click.Group:
    """Factory function to create the CLI group"""

    @click.group(help='Vortex cycles, nerves and proximity on planar cell complexes.')
    @click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
                  default=LOG_LEVEL, show_default=True, help='Diagnostics level on stderr')
    def cli(log_level):
        logging.getLogger().setLevel(log_level.upper())

    register_commands(cli)
    logger.debug("vortexprox commands registered")
    return cli


def main():
    create_app()()


if __name__ == '__main__':
    main()
