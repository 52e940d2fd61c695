import { ApiError } from './api.js';
import type { Api, Entity, ModelCard } from './types.js';

export interface EntityView {
  notFound: boolean;
  entity: Entity | null;
  card: ModelCard | null;
}

/** Entity search plus the aggregated model-card page. */
export class KgBrowser {
  results: Entity[] = [];
  view: EntityView = { notFound: false, entity: null, card: null };

  constructor(private readonly api: Api) {}

  async search(kind: string, text: string): Promise<Entity[]> {
    this.results = await this.api.kgFind({
      kind: kind || undefined,
      q: text || undefined,
    });
    return this.results;
  }

  async open(entityId: string): Promise<EntityView> {
    try {
      const entity = await this.api.kgEntity(entityId);
      const card =
        entity.kind === 'MathematicalModel' ? await this.api.kgCard(entityId) : null;
      this.view = { notFound: false, entity, card };
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.view = { notFound: true, entity: null, card: null };
      } else {
        throw error;
      }
    }
    return this.view;
  }
}
