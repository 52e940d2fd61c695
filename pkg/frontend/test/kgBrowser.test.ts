import { describe, expect, it } from 'vitest';

import { ApiError } from '../src/api.js';
import { KgBrowser } from '../src/kgBrowser.js';
import { MockApi } from './mockApi.js';
import type { Entity, ModelCard } from '../src/types.js';

const MODEL: Entity = {
  id: 'm1',
  kind: 'MathematicalModel',
  label: 'Object Comparison Model',
  description: 'compares binary objects',
  external_ids: {},
  attributes: {},
};

const CARD: ModelCard = {
  model: MODEL,
  problems: [],
  formulations: [],
  tasks: [
    {
      id: 't1',
      kind: 'ComputationalTask',
      label: 'Extraction of Logical Rules',
      formulations: [],
      input_quantities: [{ id: 'q1', kind: 'Quantity', label: 'encoded object vector' }],
      output_quantities: [{ id: 'q2', kind: 'Quantity', label: 'logical rules' }],
    },
  ],
  publications: {},
  related_models: { generalizes: [], specializes: [], combines: [], combined_by: [] },
};

class GraphApi extends MockApi {
  findCalls: Array<{ kind?: string; q?: string }> = [];

  override async kgFind(params: { kind?: string; q?: string }): Promise<Entity[]> {
    this.findCalls.push(params);
    return params.q === 'object' ? [MODEL] : [];
  }

  override async kgEntity(id: string): Promise<Entity> {
    if (id !== 'm1') throw new ApiError('missing', 'missing_entity', 404);
    return MODEL;
  }

  override async kgCard(id: string): Promise<ModelCard> {
    if (id !== 'm1') throw new ApiError('missing', 'missing_entity', 404);
    return CARD;
  }
}

describe('KgBrowser', () => {
  it('search passes filters through and keeps results', async () => {
    const api = new GraphApi();
    const browser = new KgBrowser(api);
    const hits = await browser.search('MathematicalModel', 'object');
    expect(hits.map((e) => e.label)).toEqual(['Object Comparison Model']);
    expect(api.findCalls).toEqual([{ kind: 'MathematicalModel', q: 'object' }]);
  });

  it('empty search yields an empty-state result list', async () => {
    const browser = new KgBrowser(new GraphApi());
    expect(await browser.search('', 'nothing-here')).toEqual([]);
  });

  it('model pages include the task card with input/output quantities', async () => {
    const browser = new KgBrowser(new GraphApi());
    const view = await browser.open('m1');
    expect(view.notFound).toBe(false);
    expect(view.card?.tasks[0].label).toBe('Extraction of Logical Rules');
    expect(view.card?.tasks[0].output_quantities.map((q) => q.label)).toEqual(['logical rules']);
  });

  it('bad ids produce the not-found view, not an exception', async () => {
    const browser = new KgBrowser(new GraphApi());
    const view = await browser.open('ghost');
    expect(view).toEqual({ notFound: true, entity: null, card: null });
  });
});
