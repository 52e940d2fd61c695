/** Payload shapes of the mathdoc HTTP API. Every displayed value in
 * the UI originates from one of these responses. */

export interface Question {
  id: string;
  prompt: string;
  type:
    | 'free_text'
    | 'controlled_term'
    | 'entity_ref'
    | 'entity_ref_list'
    | 'boolean_flag'
    | 'doi_string';
  mandatory: boolean;
  allowed?: string[];
  entity_kind?: string;
}

export interface Section {
  id: string;
  title: string;
  questions: Question[];
}

export interface Template {
  version: string;
  sections: Section[];
}

export type AnswerValue =
  | string
  | boolean
  | { ref: string; label?: string }
  | { inline: Record<string, unknown> }
  | Array<{ ref: string; label?: string } | { inline: Record<string, unknown> }>;

export interface SessionDoc {
  session_id: string;
  template_version: string;
  status: 'draft' | 'complete' | 'exported';
  answers: Record<string, AnswerValue>;
  pending_suggestions?: string[];
  export_record?: ExportReport | null;
  rules_attachment?: unknown;
}

export interface Candidate {
  provenance: 'kg' | 'external';
  label: string;
  description: string;
  ref: string | null;
  payload: Record<string, unknown>;
}

export interface Completeness {
  missing: string[];
  complete: boolean;
}

export interface ExportReport {
  workflow_id: string;
  created: string[];
  reused: string[];
  relations_added: [string, string, string][];
}

export interface ExportResult {
  wiki_markdown: string;
  export_report: ExportReport;
}

export interface Entity {
  id: string;
  kind: string;
  label: string;
  description: string;
  external_ids: Record<string, string>;
  attributes: Record<string, string>;
}

export interface EntityBrief {
  id: string;
  kind: string;
  label: string;
}

export interface ModelCard {
  model: Entity;
  problems: Array<EntityBrief & { fields: EntityBrief[] }>;
  formulations: Array<
    EntityBrief & { formula?: string; quantities: Array<EntityBrief & { quantity_kinds: EntityBrief[] }> }
  >;
  tasks: Array<
    EntityBrief & {
      formulations: EntityBrief[];
      input_quantities: EntityBrief[];
      output_quantities: EntityBrief[];
    }
  >;
  publications: Record<string, EntityBrief[]>;
  related_models: Record<string, EntityBrief[]>;
}

export interface JobStatus {
  job_id: string;
  state: 'queued' | 'running' | 'done' | 'failed';
  order: string;
  dataset_digest: string;
  error: string;
}

export interface RuleRow {
  polynomial: string;
  form: string;
  text: string;
  support: number;
}

export interface RulesDoc {
  schema: string;
  metadata: {
    order: string;
    property_names: string[];
    dataset_digest: string;
    distinct_point_count: number;
    duplicate_count: number;
    rule_count: number;
    form_counts: Record<string, number>;
  };
  rules: RuleRow[];
}

/** Surface the controllers depend on; ApiClient implements it and the
 * contract tests substitute plain-object mocks. */
export interface Api {
  template(): Promise<Template>;
  newSession(): Promise<{ session_id: string; session: SessionDoc }>;
  getSession(id: string): Promise<SessionDoc>;
  setAnswer(id: string, qid: string, value: unknown): Promise<SessionDoc>;
  suggest(id: string, qid: string, text?: string): Promise<Candidate[]>;
  completeness(id: string): Promise<Completeness>;
  exportSession(id: string, policy?: string): Promise<ExportResult>;
  kgFind(params: { kind?: string; q?: string }): Promise<Entity[]>;
  kgEntity(id: string): Promise<Entity>;
  kgCard(id: string): Promise<ModelCard>;
  submitJob(file: Blob, filename: string, order?: string): Promise<string>;
  jobStatus(jobId: string): Promise<JobStatus>;
  jobRules(jobId: string): Promise<RulesDoc>;
}
