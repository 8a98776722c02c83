"""
DuckDB layer for pivoting tidy scenario-grid results.
"""
import logging
from typing import List, Optional

import duckdb
import pandas as pd

logger = logging.getLogger(__name__)


class DuckDBManager:
    """In-memory DuckDB over the tidy results table and the scenario table"""

    def __init__(self):
        self.conn = duckdb.connect()
        self._tables: List[str] = []

    def load_dataframe(self, df: pd.DataFrame, table_name: str):
        """Register a pandas DataFrame as a DuckDB virtual table (zero-copy)"""
        if table_name in self._tables:
            self.conn.unregister(table_name)
        self.conn.register(table_name, df)
        self._tables.append(table_name)

    def load_results(self, tidy: pd.DataFrame, scenarios: pd.DataFrame):
        self.load_dataframe(tidy, 'results')
        self.load_dataframe(scenarios, 'scenarios')

    def _query(self, sql: str, params: Optional[list] = None) -> pd.DataFrame:
        """Execute SQL query and return result as DataFrame"""
        return self.conn.execute(sql, params or []).fetchdf()

    def close(self):
        self.conn.close()

    # -- Lookups ----------------------------------------------------------

    def metric_names(self, prefix: str = '') -> List[str]:
        df = self._query("SELECT DISTINCT metric FROM results WHERE starts_with(metric, ?) ORDER BY metric", [prefix])
        return df['metric'].tolist()

    # -- Pivots -----------------------------------------------------------

    def metric_pivot(self, metric: str, row_axis: str, col_axis: str) -> pd.DataFrame:
        """
        One metric laid out over two scenario axes

        Args:
            metric: Tidy metric name, e.g. ``p2h_mwh``
            row_axis: Scenario column for the rows
            col_axis: Scenario column for the columns

        Returns:
            Wide frame indexed by ``row_axis`` values; cells averaged when
            other axes vary
        """
        long = self._query(f"""
            SELECT s."{row_axis}" AS row_value, s."{col_axis}" AS col_value, AVG(r.value) AS value
            FROM results r JOIN scenarios s USING (scenario_key)
            WHERE r.metric = ?
            GROUP BY 1, 2
            ORDER BY 1, 2
        """, [metric])
        if long.empty:
            return pd.DataFrame()
        wide = long.pivot(index='row_value', columns='col_value', values='value')
        wide.index.name = row_axis
        wide.columns.name = col_axis
        return wide

    def section_long(self, sections: List[str]) -> pd.DataFrame:
        """Metrics of the given report sections split into (section, item) columns"""
        placeholders = ', '.join('?' for _ in sections)
        return self._query(f"""
            SELECT r.scenario_key,
                   split_part(r.metric, '.', 1) AS section,
                   substr(r.metric, strpos(r.metric, '.') + 1) AS item,
                   r.value
            FROM results r
            WHERE split_part(r.metric, '.', 1) IN ({placeholders})
            ORDER BY r.scenario_key, section, item
        """, list(sections))

    def metrics_wide(self, metrics: List[str]) -> pd.DataFrame:
        """Scenario table joined with one column per requested metric"""
        if not metrics:
            return self._query("SELECT * FROM scenarios ORDER BY scenario_key")
        selects = ', '.join(
            f'MAX(CASE WHEN r.metric = ? THEN r.value END) AS "{m}"' for m in metrics)
        return self._query(f"""
            SELECT s.*, {selects}
            FROM scenarios s LEFT JOIN results r USING (scenario_key)
            GROUP BY ALL
            ORDER BY scenario_key
        """, list(metrics))
