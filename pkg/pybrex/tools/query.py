import argparse
import asyncio

from pybrex.harness.configmanager import ConfigManager
from pybrex.harness.reports import REPORT_COLUMNS
from pybrex.harness.result_store import ResultStore


def print_rows(rows, columns):
    if not rows:
        print("No records found.")
        return
    print(", ".join(columns))
    for row in rows:
        print(", ".join("" if v is None else str(v) for v in row))


async def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Query stored pybrex runs and trial records."
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--config", help="Experiment config whose [output] store names the database"
    )
    source.add_argument(
        "--db", help="Path to the sqlite result store"
    )
    parser.add_argument(
        "--run", type=int, help="Run id to list trials for (if omitted, lists runs)"
    )
    args = parser.parse_args(argv)

    db_path = args.db or ConfigManager(args.config).resolve_path('output', 'store')
    if not db_path:
        print("No result store configured ([output] store).")
        return
    store = ResultStore(db_path)
    await store.initialize()
    try:
        if args.run is None:
            print_rows(await store.list_runs(), ("run_id", "command", "config_path", "seed", "created"))
        else:
            print_rows(await store.get_trials(args.run), ("run_id",) + REPORT_COLUMNS)
    finally:
        await store.close()


if __name__ == "__main__":
    asyncio.run(main())
