/** HTML table builders for the text-centric pages (overview, configuration
 * detail). Pure string functions so they render anywhere. */

import { escapeHtml, fmt, fmtDuration } from './format.js';
import type { ConfigDetailData, OverviewData } from './types.js';

function table(headers: string[], rows: string[][], cls = ''): string {
  const head = headers.map((h) => `<th>${escapeHtml(h)}</th>`).join('');
  const body = rows
    .map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join('')}</tr>`)
    .join('');
  return `<table class="data ${cls}"><thead><tr>${head}</tr></thead>` +
         `<tbody>${body}</tbody></table>`;
}

function section(title: string, inner: string): string {
  return `<section><h3>${escapeHtml(title)}</h3>${inner}</section>`;
}

export function overviewHtml(data: OverviewData): string {
  const metaRows = [
    ['name', escapeHtml(data.meta.name)],
    ['run id', `<code>${escapeHtml(data.meta.id)}</code>`],
    ['optimizer', escapeHtml(data.meta.optimizer)],
    ['trials', String(data.n_trials)],
    ['configurations', String(data.n_configs)],
    ['budgets', data.budgets.map((b) => fmt(b)).join(', ') || '-'],
    ['duration', fmtDuration(data.duration)],
  ];
  const bestRows = data.best.map((b) => [
    escapeHtml(b.objective),
    b.config_id
      ? `<a href="#" class="config-link" data-config="${escapeHtml(b.config_id)}">` +
        `${escapeHtml(b.config_id)}</a>`
      : '-',
    fmt(b.value),
  ]);
  const statusNames = Object.keys(data.status_counts.all)
    .filter((s) => data.status_counts.all[s] > 0 || s === 'success');
  const statusRows = [
    ['all', ...statusNames.map((s) => String(data.status_counts.all[s]))],
    ...data.status_counts.per_budget.map((pb) => [
      fmt(pb.budget), ...statusNames.map((s) => String(pb.counts[s] ?? 0)),
    ]),
  ];
  const hpRows = data.space.hyperparameters.map((hp) => [
    escapeHtml(hp.name),
    escapeHtml(hp.type),
    hp.choices?.length
      ? hp.choices.map(escapeHtml).join(', ')
      : hp.lower !== undefined && hp.lower !== null
        ? `[${fmt(hp.lower)}, ${fmt(hp.upper)}]${hp.log_scale ? ' log' : ''}`
        : '-',
    fmt(hp.default),
    hp.condition
      ? `${escapeHtml(hp.condition.parent)} &isin; ` +
        `{${hp.condition.values.map((v) => escapeHtml(String(v))).join(', ')}}`
      : '-',
  ]);
  return [
    section('Run', table(['property', 'value'], metaRows)),
    section('Best configurations', table(['objective', 'config', 'value'], bestRows)),
    section('Trial statuses', table(['budget', ...statusNames], statusRows)),
    section(`Search space (${data.space.n_hyperparameters} hyperparameters)`,
            table(['name', 'type', 'range / choices', 'default', 'condition'], hpRows)),
  ].join('');
}

export function configDetailHtml(data: ConfigDetailData): string {
  const incumbentOf = Object.entries(data.incumbent)
    .filter(([, yes]) => yes).map(([o]) => o);
  const badge = incumbentOf.length
    ? `<p class="badge">incumbent for ${incumbentOf.map(escapeHtml).join(', ')}</p>`
    : '';
  const valueRows = Object.entries(data.values)
    .map(([k, v]) => [escapeHtml(k), fmt(v)]);
  const objectiveNames = [...new Set(data.trials.flatMap((t) => Object.keys(t.objectives)))];
  const trialRows = data.trials.map((t) => [
    fmt(t.budget),
    escapeHtml(t.status),
    t.seed === null ? '-' : String(t.seed),
    ...objectiveNames.map((o) => fmt(t.objectives[o])),
    t.end === null ? '-' : fmtDuration(t.end - t.start),
  ]);
  return [
    `<h2>Configuration <code>${escapeHtml(data.config_id)}</code></h2>`,
    badge,
    section('Values', table(['hyperparameter', 'value'], valueRows)),
    section('Trials',
            table(['budget', 'status', 'seed', ...objectiveNames, 'duration'], trialRows)),
    section('Encoded vector',
            `<code class="encoded">[${data.encoded.map((v) => fmt(v, 3)).join(', ')}]</code>`),
  ].join('');
}
