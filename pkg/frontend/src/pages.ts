/** Plugin page controller: filter form, job submission, chart or table
 * rendering, click-through, export. A page never shows a payload that does
 * not match its current params (each change bumps a sequence token). */

import * as echarts from 'echarts';
import type { EChartsOption } from 'echarts';

import type { ApiClient } from './api.js';
import {
  ablationPathOption,
  budgetCorrelationOption,
  clickedConfigId,
  costOverTimeOption,
  footprintOption,
  importancesOption,
  parallelCoordinatesOption,
  paretoFrontOption,
  pdpOption,
} from './charts.js';
import { exportPng, exportSvg } from './export.js';
import { escapeHtml } from './format.js';
import { budgetChoices, defaultParams, type PluginSpec } from './plugins.js';
import { configRoute } from './router.js';
import { configDetailHtml, overviewHtml } from './tables.js';
import type {
  AblationData,
  BudgetCorrelationData,
  FootprintData,
  ImportancesData,
  ParallelData,
  ParetoData,
  Payload,
  PdpData,
  RunDetail,
  TrajectoryData,
} from './types.js';

export interface PageContext {
  api: ApiClient;
  run: RunDetail;
  /** Id the registry knows the run by (used in URLs and job submissions). */
  registryId: string;
  /** Extra run ids to include on multi-run pages. */
  selection: string[];
  container: HTMLElement;
  navigate: (hash: string) => void;
}

/** Option for a finished chart payload; null for the table pages. */
export function buildChartOption(plugin: string, payload: Payload): EChartsOption | null {
  const objective = String(payload.params['objective'] ?? '');
  switch (plugin) {
    case 'footprint':
      return footprintOption(payload.data as FootprintData, objective);
    case 'cost_over_time':
      return costOverTimeOption(payload.data as TrajectoryData, objective);
    case 'pareto_front':
      return paretoFrontOption(payload.data as ParetoData);
    case 'parallel_coordinates':
      return parallelCoordinatesOption(payload.data as ParallelData);
    case 'pdp':
      return pdpOption(payload.data as PdpData, objective);
    case 'importances':
      return importancesOption(payload.data as ImportancesData);
    case 'ablation_path':
      return ablationPathOption(payload.data as AblationData, objective);
    case 'budget_correlation':
      return budgetCorrelationOption(payload.data as BudgetCorrelationData);
    default:
      return null;
  }
}

/** Plugins whose points navigate to the configuration detail page. */
const CLICK_THROUGH = new Set(['footprint', 'pareto_front']);

export function errorBannerHtml(message: string): string {
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}

function fieldInputHtml(spec: PluginSpec, run: RunDetail,
                        params: Record<string, unknown>): string {
  const rows = spec.fields.map((f) => {
    const current = String(params[f.name] ?? '');
    let input: string;
    const select = (options: string[]) =>
      `<select name="${f.name}">` +
      options.map((o) =>
        `<option value="${escapeHtml(o)}"${o === current ? ' selected' : ''}>` +
        `${escapeHtml(o)}</option>`).join('') +
      '</select>';
    switch (f.kind) {
      case 'objective':
        input = select(run.objectives.map((o) => o.name));
        break;
      case 'budget':
        input = select(budgetChoices(run));
        break;
      case 'hyperparameter':
        input = select(run.space.hyperparameters
          .filter((h) => h.type !== 'constant').map((h) => h.name));
        break;
      case 'choice':
        input = select(f.choices ?? []);
        break;
      default:
        input = `<input type="number" name="${f.name}" value="${escapeHtml(current)}">`;
    }
    return `<label class="field">${escapeHtml(f.name)} ${input}</label>`;
  });
  return rows.join('');
}

function coerceParam(kind: string, raw: string): unknown {
  if (kind === 'int') return Number(raw);
  if (kind === 'budget') {
    return raw === 'highest' || raw === 'all' ? raw : Number(raw);
  }
  return raw;
}

export class PluginPage {
  private seq = 0;
  private chart: echarts.ECharts | null = null;
  private params: Record<string, unknown>;

  constructor(private ctx: PageContext, private spec: PluginSpec,
              query: Record<string, string> = {}) {
    this.params = defaultParams(spec, ctx.run);
    for (const f of spec.fields) {
      if (query[f.name] !== undefined) {
        this.params[f.name] = coerceParam(f.kind, query[f.name]);
      }
    }
    if (spec.id === 'configurations' && query['config_id']) {
      this.params['config_id'] = query['config_id'];
    }
  }

  async mount(): Promise<void> {
    const { container, run } = this.ctx;
    const live = run.live ? '<span class="live-badge">live</span>' : '';
    container.innerHTML = `
      <header class="page-head">
        <h2>${escapeHtml(this.spec.title)} &mdash; ${escapeHtml(run.meta.name)} ${live}</h2>
        <form class="filters">${fieldInputHtml(this.spec, run, this.params)}</form>
        <div class="actions">
          <button class="export-svg" disabled>Export SVG</button>
          <button class="export-png" disabled>Export PNG</button>
        </div>
      </header>
      <div class="page-body"><p class="loading">computing&hellip;</p></div>`;
    const form = container.querySelector('form.filters') as HTMLFormElement;
    form.addEventListener('change', () => {
      for (const f of this.spec.fields) {
        const el = form.elements.namedItem(f.name) as HTMLInputElement | HTMLSelectElement | null;
        if (el) this.params[f.name] = coerceParam(f.kind, el.value);
      }
      void this.refresh();
    });
    this.wireExport();
    await this.refresh();
  }

  dispose(): void {
    this.seq += 1;
    this.chart?.dispose();
    this.chart = null;
  }

  private body(): HTMLElement {
    return this.ctx.container.querySelector('.page-body') as HTMLElement;
  }

  private wireExport(): void {
    const svgBtn = this.ctx.container.querySelector('.export-svg') as HTMLButtonElement;
    const pngBtn = this.ctx.container.querySelector('.export-png') as HTMLButtonElement;
    const name = () => `${this.ctx.run.meta.name}-${this.spec.id}`;
    svgBtn.addEventListener('click', (e) => {
      e.preventDefault();
      if (this.chart) exportSvg(this.chart, name());
    });
    pngBtn.addEventListener('click', (e) => {
      e.preventDefault();
      if (this.chart) void exportPng(this.chart, name());
    });
  }

  private setExportEnabled(on: boolean): void {
    for (const sel of ['.export-svg', '.export-png']) {
      const btn = this.ctx.container.querySelector(sel) as HTMLButtonElement | null;
      if (btn) btn.disabled = !on;
    }
  }

  async refresh(): Promise<void> {
    const seq = ++this.seq;
    const body = this.body();
    this.chart?.dispose();
    this.chart = null;
    this.setExportEnabled(false);
    body.innerHTML = '<p class="loading">computing&hellip;</p>';

    try {
      if (this.spec.id === 'overview') {
        body.innerHTML = overviewHtml(this.ctx.run);
        this.wireConfigLinks(body);
        return;
      }
      if (this.spec.id === 'configurations') {
        const configId = String(this.params['config_id'] ??
                                this.ctx.run.best[0]?.config_id ?? '');
        const detail = await this.ctx.api.getConfig(this.ctx.registryId, configId);
        if (seq !== this.seq) return;
        body.innerHTML = configDetailHtml(detail);
        return;
      }

      const runIds = this.spec.multiRun
        ? [...new Set([this.ctx.registryId, ...this.ctx.selection])]
        : [this.ctx.registryId];
      const status = await this.ctx.api.runJob(this.spec.id, this.params, runIds);
      if (seq !== this.seq) return;
      if (status.state === 'failed' || !status.result) {
        body.innerHTML = errorBannerHtml(status.error ?? 'job failed');
        return;
      }
      const option = buildChartOption(this.spec.id, status.result);
      if (!option) {
        body.innerHTML = errorBannerHtml(`no renderer for plugin ${this.spec.id}`);
        return;
      }
      body.innerHTML = '<div class="chart"></div>';
      const el = body.querySelector('.chart') as HTMLDivElement;
      this.chart = echarts.init(el, undefined, { renderer: 'svg' });
      this.chart.setOption(option);
      this.setExportEnabled(true);
      if (CLICK_THROUGH.has(this.spec.id)) {
        this.chart.on('click', (p) => {
          const configId = clickedConfigId(p);
          if (configId) {
            this.ctx.navigate(configRoute(this.ctx.registryId, configId));
          }
        });
      }
    } catch (err) {
      if (seq !== this.seq) return;
      body.innerHTML = errorBannerHtml(err instanceof Error ? err.message : String(err));
    }
  }

  private wireConfigLinks(body: HTMLElement): void {
    for (const link of body.querySelectorAll('a.config-link')) {
      link.addEventListener('click', (e) => {
        e.preventDefault();
        const id = (link as HTMLElement).dataset['config'];
        if (id) this.ctx.navigate(configRoute(this.ctx.registryId, id));
      });
    }
  }
}
