/** Hash router: #/run/<id>/<plugin>?k=v&... plus the run-list root. */

export interface Route {
  runId: string | null;
  plugin: string | null;
  query: Record<string, string>;
}

export function parseHash(hash: string): Route {
  const clean = hash.replace(/^#\/?/, '');
  const [path, queryString] = clean.split('?', 2);
  const query: Record<string, string> = {};
  if (queryString) {
    for (const [k, v] of new URLSearchParams(queryString)) query[k] = v;
  }
  const parts = path.split('/').filter(Boolean);
  if (parts[0] !== 'run' || parts.length < 2) {
    return { runId: null, plugin: null, query };
  }
  return {
    runId: decodeURIComponent(parts[1]),
    plugin: parts.length > 2 ? decodeURIComponent(parts[2]) : null,
    query,
  };
}

export function buildHash(runId: string, plugin: string,
                          query: Record<string, string> = {}): string {
  const qs = new URLSearchParams(query).toString();
  const base = `#/run/${encodeURIComponent(runId)}/${encodeURIComponent(plugin)}`;
  return qs ? `${base}?${qs}` : base;
}

/** Route a footprint/pareto point click lands on. */
export function configRoute(runId: string, configId: string): string {
  return buildHash(runId, 'configurations', { config_id: configId });
}
