import type { Api, JobStatus, RuleRow, RulesDoc } from './types.js';

export type PanelState = 'idle' | 'uploading' | 'polling' | 'done' | 'failed';

export type SortColumn = 'text' | 'form' | 'support';

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/** CSV upload, job polling, and the sortable/filterable rules table. */
export class RulesPanel {
  state: PanelState = 'idle';
  fileName = '';
  jobId: string | null = null;
  jobState: JobStatus | null = null;
  error = '';
  rulesDoc: RulesDoc | null = null;

  sortColumn: SortColumn = 'support';
  sortDescending = true;
  formFilter: string | null = null;

  constructor(
    private readonly api: Api,
    private readonly pollIntervalMs = 400,
  ) {}

  /** Upload a CSV, then poll until the job reaches a terminal state. */
  async upload(file: Blob, filename: string, order = 'degrevlex'): Promise<PanelState> {
    this.state = 'uploading';
    this.fileName = filename;
    this.error = '';
    this.rulesDoc = null;
    try {
      this.jobId = await this.api.submitJob(file, filename, order);
    } catch (error) {
      this.state = 'failed';
      this.error = error instanceof Error ? error.message : String(error);
      return this.state;
    }
    this.state = 'polling';
    for (;;) {
      this.jobState = await this.api.jobStatus(this.jobId);
      if (this.jobState.state === 'done') {
        this.rulesDoc = await this.api.jobRules(this.jobId);
        this.state = 'done';
        return this.state;
      }
      if (this.jobState.state === 'failed') {
        this.error = this.jobState.error;
        this.state = 'failed';
        return this.state;
      }
      await sleep(this.pollIntervalMs);
    }
  }

  get formTags(): string[] {
    if (!this.rulesDoc) return [];
    return Object.keys(this.rulesDoc.metadata.form_counts).sort();
  }

  setSort(column: SortColumn): void {
    if (this.sortColumn === column) {
      this.sortDescending = !this.sortDescending;
    } else {
      this.sortColumn = column;
      this.sortDescending = column === 'support';
    }
  }

  setFormFilter(tag: string | null): void {
    this.formFilter = tag;
  }

  /** Rows exactly as served, filtered and ordered for display. */
  get visibleRows(): RuleRow[] {
    const rows = (this.rulesDoc?.rules ?? []).filter(
      (row) => this.formFilter === null || row.form === this.formFilter,
    );
    const column = this.sortColumn;
    rows.sort((a, b) => {
      const left = a[column];
      const right = b[column];
      const cmp =
        typeof left === 'number' && typeof right === 'number'
          ? left - right
          : String(left).localeCompare(String(right));
      return this.sortDescending ? -cmp : cmp;
    });
    return rows;
  }

  downloadJson(): string {
    if (!this.rulesDoc) throw new Error('no rules loaded');
    return JSON.stringify(this.rulesDoc, null, 2);
  }
}
