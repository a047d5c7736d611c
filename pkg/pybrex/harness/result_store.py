import asyncio
import logging
import os
from datetime import datetime, timezone

UTC = timezone.utc

import aiosqlite


class ResultStore:
    """
    Asynchronous store of run and trial records on aiosqlite.
    """
    def __init__(self, db_path):
        self.db_path = db_path
        db_dir = os.path.dirname(db_path)
        if db_dir and not os.path.exists(db_dir):
            os.makedirs(db_dir, exist_ok=True)
        self.conn = None
        self.logger = logging.getLogger(self.__class__.__name__)
        self._lock = asyncio.Lock()

    async def initialize(self):
        self.conn = await aiosqlite.connect(self.db_path)
        await self.create_tables()
        self.logger.info(f"Result store ready at {self.db_path}")

    async def create_tables(self):
        if not self.conn:
            self.logger.warning("Attempted to create tables after DB was closed.")
            return
        async with self.conn.cursor() as cursor:
            await cursor.execute('''
                CREATE TABLE IF NOT EXISTS runs (
                    run_id INTEGER PRIMARY KEY AUTOINCREMENT,
                    command TEXT, config_path TEXT, seed TEXT, created TEXT
                )
            ''')
            await cursor.execute('''
                CREATE TABLE IF NOT EXISTS trials (
                    run_id INTEGER, trial INTEGER, seed TEXT, lambda0 REAL,
                    certified INTEGER, interval_lo REAL, interval_hi REAL,
                    bf_support TEXT, bf_objective REAL, oracle_match INTEGER,
                    solver_objective REAL, solver_critical INTEGER,
                    PRIMARY KEY (run_id, trial, lambda0)
                )
            ''')
        await self.conn.commit()

    async def start_run(self, command, config_path, seed):
        if not self.conn:
            self.logger.warning("Attempted to start a run after DB was closed.")
            return None
        async with self._lock:
            async with self.conn.cursor() as cursor:
                await cursor.execute(
                    "INSERT INTO runs (command, config_path, seed, created) VALUES (?, ?, ?, ?)",
                    (command, config_path, str(seed), datetime.now(UTC).isoformat())
                )
                run_id = cursor.lastrowid
            await self.conn.commit()
        return run_id

    async def store_trial(self, run_id, row):
        if not self.conn:
            self.logger.warning("Attempted to store a trial after DB was closed.")
            return
        async with self._lock:
            async with self.conn.cursor() as cursor:
                await cursor.execute(
                    "INSERT OR REPLACE INTO trials VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (run_id, row.trial, str(row.seed), row.lambda0, int(row.certified),
                     row.interval_lo, row.interval_hi,
                     " ".join(str(i) for i in row.bf_support) if row.bf_support is not None else None,
                     row.bf_objective, None if row.oracle_match is None else int(row.oracle_match),
                     row.solver_objective, None if row.solver_critical is None else int(row.solver_critical))
                )
            await self.conn.commit()

    async def get_trials(self, run_id):
        if not self.conn:
            self.logger.warning("Attempted to read trials after DB was closed.")
            return []
        async with self._lock:
            async with self.conn.cursor() as cursor:
                await cursor.execute(
                    "SELECT * FROM trials WHERE run_id = ? ORDER BY trial, lambda0", (run_id,)
                )
                return await cursor.fetchall()

    async def list_runs(self):
        if not self.conn:
            self.logger.warning("Attempted to list runs after DB was closed.")
            return []
        async with self._lock:
            async with self.conn.cursor() as cursor:
                await cursor.execute("SELECT run_id, command, config_path, seed, created FROM runs ORDER BY run_id")
                return await cursor.fetchall()

    async def shutdown(self):
        """
        Wait for pending writes to finish. Call before close().
        """
        async with self._lock:
            pass

    async def close(self):
        await self.shutdown()
        if self.conn:
            await self.conn.close()
            self.conn = None
            self.logger.info("Database connection closed.")
