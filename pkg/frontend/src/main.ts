/** Application shell: run list sidebar, plugin navigation, hash routing.
 * The run list re-polls so live runs surface without a reload; charts only
 * recompute when the user changes something. */

import { ApiClient } from './api.js';
import { PluginPage } from './pages.js';
import { CONFIGURATIONS, PLUGINS, pluginSpec } from './plugins.js';
import { buildHash, parseHash } from './router.js';
import { escapeHtml } from './format.js';
import type { RunSummary } from './types.js';

const RUN_LIST_POLL_MS = 3000;

const api = new ApiClient('');
let runs: RunSummary[] = [];
let currentPage: PluginPage | null = null;
/** Runs ticked for multi-run plugins, keyed by registry id. */
const selection = new Set<string>();

function sidebarEl(): HTMLElement {
  return document.getElementById('sidebar') as HTMLElement;
}

function contentEl(): HTMLElement {
  return document.getElementById('content') as HTMLElement;
}

function navigate(hash: string): void {
  window.location.hash = hash;
}

function renderSidebar(): void {
  const route = parseHash(window.location.hash);
  const runItems = runs.map((r) => {
    const active = r.id === route.runId ? ' class="active"' : '';
    const live = r.live ? ' <span class="live-badge">live</span>' : '';
    const checked = selection.has(r.id) ? ' checked' : '';
    return `<li${active}>
      <input type="checkbox" data-select="${escapeHtml(r.id)}"${checked}
             title="include in multi-run selections">
      <a href="${buildHash(r.id, 'overview')}">${escapeHtml(r.name)}</a>${live}
      <small>${r.n_trials} trials</small>
    </li>`;
  }).join('');
  const pluginItems = route.runId
    ? [...PLUGINS, CONFIGURATIONS].map((p) => {
        const active = p.id === route.plugin ? ' class="active"' : '';
        return `<li${active}><a href="${buildHash(route.runId as string, p.id)}">` +
               `${escapeHtml(p.title)}</a></li>`;
      }).join('')
    : '';
  sidebarEl().innerHTML = `
    <h1><a href="#/">hpolens</a></h1>
    <h2>Runs</h2>
    <ul class="runs">${runItems || '<li><em>no runs found</em></li>'}</ul>
    ${route.runId ? `<h2>Analyses</h2><ul class="plugins">${pluginItems}</ul>` : ''}`;
  for (const box of sidebarEl().querySelectorAll('input[data-select]')) {
    box.addEventListener('change', () => {
      const id = (box as HTMLInputElement).dataset['select'] as string;
      if ((box as HTMLInputElement).checked) selection.add(id);
      else selection.delete(id);
    });
  }
}

async function refreshRuns(): Promise<void> {
  try {
    runs = await api.listRuns();
  } catch {
    // service unreachable; keep the last known list
  }
  renderSidebar();
}

async function route(): Promise<void> {
  const r = parseHash(window.location.hash);
  renderSidebar();
  currentPage?.dispose();
  currentPage = null;
  const content = contentEl();
  if (!r.runId) {
    content.innerHTML = `
      <div class="welcome">
        <h2>hpolens dashboard</h2>
        <p>Pick a run on the left. Tick several runs to overlay them on the
           multi-run pages (cost over time, pareto front).</p>
      </div>`;
    return;
  }
  const spec = pluginSpec(r.plugin ?? 'overview');
  if (!spec) {
    content.innerHTML = `<div class="error-banner">unknown page: ${escapeHtml(String(r.plugin))}</div>`;
    return;
  }
  try {
    const run = await api.getRun(r.runId);
    const page = new PluginPage({
      api,
      run,
      registryId: r.runId,
      selection: [...selection],
      container: content,
      navigate,
    }, spec, r.query);
    currentPage = page;
    await page.mount();
  } catch (err) {
    content.innerHTML = `<div class="error-banner">` +
      `${escapeHtml(err instanceof Error ? err.message : String(err))}</div>`;
  }
}

window.addEventListener('hashchange', () => void route());
window.addEventListener('DOMContentLoaded', () => {
  void refreshRuns().then(() => route());
  setInterval(() => void refreshRuns(), RUN_LIST_POLL_MS);
});
