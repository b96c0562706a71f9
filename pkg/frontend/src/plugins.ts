/** Client-side mirror of the service plugin registry: page list and filter
 * widgets. Values are sent verbatim; the service owns validation. */

import type { RunDetail } from './types.js';

export type FieldKind = 'objective' | 'budget' | 'hyperparameter' | 'choice' | 'int';

export interface ParamField {
  name: string;
  kind: FieldKind;
  choices?: string[];
  default?: unknown;
  /** Picks the n-th objective as the default ('objective' fields only). */
  objectiveIndex?: number;
}

export interface PluginSpec {
  id: string;
  title: string;
  fields: ParamField[];
  /** Accepts more than one selected run (groups computed server-side). */
  multiRun: boolean;
}

const OBJECTIVE: ParamField = { name: 'objective', kind: 'objective' };
const BUDGET: ParamField = { name: 'budget', kind: 'budget' };
const SEED: ParamField = { name: 'seed', kind: 'int', default: 0 };
const N_TREES: ParamField = { name: 'n_trees', kind: 'int', default: 16 };

/** The nine analysis pages, in sidebar order. */
export const PLUGINS: PluginSpec[] = [
  { id: 'overview', title: 'Overview', fields: [], multiRun: false },
  {
    id: 'cost_over_time', title: 'Cost Over Time', multiRun: true,
    fields: [OBJECTIVE, BUDGET,
             { name: 'x_axis', kind: 'choice', choices: ['trials', 'time'], default: 'trials' }],
  },
  {
    id: 'pareto_front', title: 'Pareto Front', multiRun: true,
    fields: [{ name: 'objective_a', kind: 'objective', objectiveIndex: 0 },
             { name: 'objective_b', kind: 'objective', objectiveIndex: 1 },
             BUDGET],
  },
  {
    id: 'parallel_coordinates', title: 'Parallel Coordinates', multiRun: false,
    fields: [OBJECTIVE, BUDGET, { name: 'max_lines', kind: 'int', default: 200 }],
  },
  {
    id: 'importances', title: 'Importances', multiRun: false,
    fields: [OBJECTIVE, BUDGET,
             { name: 'method', kind: 'choice', choices: ['fanova', 'lpi'], default: 'fanova' },
             N_TREES, SEED],
  },
  {
    id: 'pdp', title: 'Partial Dependence', multiRun: false,
    fields: [OBJECTIVE, BUDGET, { name: 'hp', kind: 'hyperparameter' },
             { name: 'grid_size', kind: 'int', default: 20 },
             { name: 'n_samples', kind: 'int', default: 50 }, N_TREES, SEED],
  },
  {
    id: 'ablation_path', title: 'Ablation Path', multiRun: false,
    fields: [OBJECTIVE, BUDGET, N_TREES, SEED],
  },
  {
    id: 'budget_correlation', title: 'Budget Correlation', multiRun: false,
    fields: [OBJECTIVE],
  },
  {
    id: 'footprint', title: 'Footprint', multiRun: false,
    fields: [OBJECTIVE, BUDGET,
             { name: 'border_cap', kind: 'int', default: 50 },
             { name: 'n_support', kind: 'int', default: 100 }, SEED],
  },
];

/** Click-through target page; routable but not one of the nine analyses. */
export const CONFIGURATIONS: PluginSpec = {
  id: 'configurations', title: 'Configurations', fields: [], multiRun: false,
};

export function pluginSpec(id: string): PluginSpec | undefined {
  if (id === CONFIGURATIONS.id) return CONFIGURATIONS;
  return PLUGINS.find((p) => p.id === id);
}

/** Default params for a plugin given the run it will analyze. */
export function defaultParams(spec: PluginSpec, run: RunDetail): Record<string, unknown> {
  const params: Record<string, unknown> = {};
  for (const f of spec.fields) {
    switch (f.kind) {
      case 'objective': {
        const i = f.objectiveIndex ?? 0;
        params[f.name] = run.objectives[Math.min(i, run.objectives.length - 1)].name;
        break;
      }
      case 'budget':
        params[f.name] = 'highest';
        break;
      case 'hyperparameter':
        params[f.name] = firstTunable(run);
        break;
      default:
        params[f.name] = f.default;
    }
  }
  return params;
}

function firstTunable(run: RunDetail): string {
  const hps = run.space.hyperparameters;
  const hp = hps.find((h) => h.type !== 'constant') ?? hps[0];
  return hp?.name ?? '';
}

/** Options a budget filter offers: named highest/all plus the run's ladder. */
export function budgetChoices(run: RunDetail): string[] {
  return ['highest', 'all', ...run.budgets.map((b) => String(b))];
}
