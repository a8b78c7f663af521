import logging
import sys

from twocenter.cli.commands import main as cli_main
from twocenter.config import settings


# Logging setup
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)


def main() -> int:
    """Console entry point"""
    logging.info(f"Starting {settings.APP_NAME}...")
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
