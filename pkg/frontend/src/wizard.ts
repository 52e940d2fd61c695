import type { Api, Candidate, Completeness, ExportResult, SessionDoc, Template } from './types.js';

export interface SuggestionPanel {
  candidates: Candidate[];
  loading: boolean;
}

/** Four-step questionnaire wizard.
 *
 * All domain state (answers, completeness, suggestions, export
 * results) comes from the server; the controller only tracks view
 * concerns: the current section, per-question input, in-flight
 * suggestion sequence numbers, and debounce timers.  Stale suggestion
 * responses are discarded by sequence number, so out-of-order
 * resolution never overwrites newer results.
 */
export class WizardController {
  template: Template | null = null;
  session: SessionDoc | null = null;
  sectionIndex = 0;
  completeness: Completeness = { missing: [], complete: false };
  suggestions = new Map<string, SuggestionPanel>();
  exportResult: ExportResult | null = null;
  fieldErrors = new Map<string, string>();

  private sequence = new Map<string, number>();
  private timers = new Map<string, ReturnType<typeof setTimeout>>();

  constructor(
    private readonly api: Api,
    readonly debounceMs = 200,
  ) {}

  /** Create a fresh session, or re-fetch an existing one so wizard
   * state survives a page reload. */
  async start(resumeSessionId?: string): Promise<void> {
    this.template = await this.api.template();
    if (resumeSessionId) {
      this.session = await this.api.getSession(resumeSessionId);
    } else {
      this.session = (await this.api.newSession()).session;
    }
    await this.refreshCompleteness();
    await this.refreshPending();
  }

  get sessionId(): string {
    if (!this.session) throw new Error('wizard not started');
    return this.session.session_id;
  }

  get sectionCount(): number {
    return this.template?.sections.length ?? 0;
  }

  get currentSection() {
    if (!this.template) throw new Error('wizard not started');
    return this.template.sections[this.sectionIndex];
  }

  get isFirst(): boolean {
    return this.sectionIndex === 0;
  }

  get isLast(): boolean {
    return this.sectionIndex === this.sectionCount - 1;
  }

  next(): void {
    if (!this.isLast) this.sectionIndex += 1;
  }

  back(): void {
    if (!this.isFirst) this.sectionIndex -= 1;
  }

  get canExport(): boolean {
    return this.completeness.complete;
  }

  answerOf(qid: string): unknown {
    return this.session?.answers[qid];
  }

  /** Push one answer; API validation errors land on the field, never
   * escape as page failures. */
  async setAnswer(qid: string, value: unknown): Promise<boolean> {
    try {
      this.session = await this.api.setAnswer(this.sessionId, qid, value);
      this.fieldErrors.delete(qid);
    } catch (error) {
      this.fieldErrors.set(qid, error instanceof Error ? error.message : String(error));
      return false;
    }
    await this.refreshCompleteness();
    await this.refreshPending();
    return true;
  }

  private async refreshCompleteness(): Promise<void> {
    this.completeness = await this.api.completeness(this.sessionId);
  }

  /** Questions the server flags as having a pending suggestion (e.g.
   * the publication after a DOI answer) are fetched eagerly so the
   * citation shows up for accept/edit without extra typing. */
  private async refreshPending(): Promise<void> {
    for (const qid of this.session?.pending_suggestions ?? []) {
      await this.requestSuggestions(qid, '');
    }
  }

  /** Debounced typeahead entry point for input handlers. */
  suggestInput(qid: string, text: string): void {
    const existing = this.timers.get(qid);
    if (existing !== undefined) clearTimeout(existing);
    this.timers.set(
      qid,
      setTimeout(() => {
        this.timers.delete(qid);
        void this.requestSuggestions(qid, text);
      }, this.debounceMs),
    );
  }

  async requestSuggestions(qid: string, text: string): Promise<void> {
    const mySeq = (this.sequence.get(qid) ?? 0) + 1;
    this.sequence.set(qid, mySeq);
    const panel = this.suggestions.get(qid) ?? { candidates: [], loading: false };
    panel.loading = true;
    this.suggestions.set(qid, panel);
    let candidates: Candidate[] = [];
    try {
      candidates = await this.api.suggest(this.sessionId, qid, text);
    } catch {
      candidates = []; // suggestion failures degrade silently
    }
    if (this.sequence.get(qid) !== mySeq) {
      return; // a newer request is in flight or already applied
    }
    this.suggestions.set(qid, { candidates, loading: false });
  }

  /** Accept a suggestion: kg candidates become references, external
   * ones become inline entities carrying the fetched metadata. */
  async acceptCandidate(qid: string, candidate: Candidate): Promise<boolean> {
    if (candidate.provenance === 'kg' && candidate.ref) {
      return this.setAnswer(qid, { ref: candidate.ref });
    }
    const inline: Record<string, unknown> = { label: candidate.label };
    if (candidate.description) inline.description = candidate.description;
    const payload = candidate.payload;
    if (typeof payload.doi === 'string') {
      inline.external_ids = { doi: payload.doi };
    } else if (typeof payload.source === 'string' && typeof payload.external_id === 'string') {
      const scheme = payload.source.replace(/-like$/, '');
      inline.external_ids = { [scheme]: payload.external_id };
    }
    return this.setAnswer(qid, { inline });
  }

  async doExport(policy = 'reuse'): Promise<ExportResult> {
    this.exportResult = await this.api.exportSession(this.sessionId, policy);
    this.session = await this.api.getSession(this.sessionId);
    return this.exportResult;
  }
}
