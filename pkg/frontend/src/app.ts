import { ApiClient } from './api.js';
import { KgBrowser } from './kgBrowser.js';
import { RulesPanel } from './rulesPanel.js';
import { WizardController } from './wizard.js';
import type { Candidate, Question } from './types.js';

const api = new ApiClient('');
const wizard = new WizardController(api);
const browser = new KgBrowser(api);
const panel = new RulesPanel(api);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function root(): HTMLElement {
  return document.getElementById('app')!;
}

// ---------------------------------------------------------------------------
// wizard tab

function renderWizard(): void {
  const host = root();
  host.innerHTML = '';
  if (!wizard.template || !wizard.session) return;

  const header = el('div', 'wizard-header');
  header.append(
    el('h2', '', `Step ${wizard.sectionIndex + 1} of ${wizard.sectionCount}: ${wizard.currentSection.title}`),
    el('p', 'session-id', `session ${wizard.sessionId}`),
  );
  host.append(header);

  const form = el('div', 'wizard-form');
  for (const question of wizard.currentSection.questions) {
    form.append(renderQuestion(question));
  }
  host.append(form);

  const nav = el('div', 'wizard-nav');
  const backButton = el('button', '', 'Back');
  backButton.disabled = wizard.isFirst;
  backButton.onclick = () => {
    wizard.back();
    renderWizard();
  };
  const nextButton = el('button', '', 'Next');
  nextButton.disabled = wizard.isLast;
  nextButton.onclick = () => {
    wizard.next();
    renderWizard();
  };
  const missing = wizard.completeness.missing.length;
  const exportButton = el('button', 'primary', 'Export to knowledge graph');
  exportButton.disabled = !wizard.canExport;
  exportButton.title = missing ? `${missing} mandatory questions missing` : 'ready';
  exportButton.onclick = async () => {
    exportButton.disabled = true;
    try {
      await wizard.doExport();
    } finally {
      renderWizard();
    }
  };
  nav.append(backButton, nextButton, exportButton);
  host.append(nav);

  if (wizard.exportResult) {
    const result = el('div', 'export-result');
    result.append(el('h3', '', 'Export result'));
    const report = wizard.exportResult.export_report;
    const summary = el('p', '', `workflow ${report.workflow_id}; created ${report.created.length}, reused ${report.reused.length}, relations ${report.relations_added.length}`);
    result.append(summary);
    const links = el('p', '', 'created entities: ');
    for (const id of report.created) {
      const link = el('a', 'entity-link', id);
      link.onclick = () => {
        void openKgTab(id);
      };
      links.append(link, document.createTextNode(' '));
    }
    result.append(links);
    const preview = el('pre', 'wiki-preview', wizard.exportResult.wiki_markdown);
    result.append(el('h3', '', 'Wiki preview'), preview);
    host.append(result);
  }
}

function renderQuestion(question: Question): HTMLElement {
  const row = el('div', 'question');
  const label = el('label', '', question.prompt + (question.mandatory ? ' *' : ''));
  label.htmlFor = question.id;
  row.append(label);

  const current = wizard.answerOf(question.id);
  if (question.type === 'boolean_flag') {
    const input = el('input') as HTMLInputElement;
    input.type = 'checkbox';
    input.id = question.id;
    input.checked = current === true;
    input.onchange = async () => {
      await wizard.setAnswer(question.id, input.checked);
      renderWizard();
    };
    row.append(input);
  } else if (question.type === 'controlled_term') {
    const select = el('select') as HTMLSelectElement;
    select.id = question.id;
    select.append(el('option', '', ''));
    for (const term of question.allowed ?? []) {
      const option = el('option', '', term) as HTMLOptionElement;
      option.selected = current === term;
      select.append(option);
    }
    select.onchange = async () => {
      if (select.value) await wizard.setAnswer(question.id, select.value);
      renderWizard();
    };
    row.append(select);
  } else if (question.type === 'entity_ref' || question.type === 'entity_ref_list') {
    row.append(renderEntityInput(question, current));
  } else {
    const input = el('input') as HTMLInputElement;
    input.type = 'text';
    input.id = question.id;
    input.value = typeof current === 'string' ? current : '';
    input.onchange = async () => {
      if (input.value.trim()) {
        await wizard.setAnswer(question.id, input.value);
        renderWizard();
      }
    };
    row.append(input);
  }

  const answered = current !== undefined;
  if (answered) row.append(el('span', 'answered-badge', 'answered'));
  const error = wizard.fieldErrors.get(question.id);
  if (error) row.append(el('p', 'field-error', error));
  return row;
}

function renderEntityInput(question: Question, current: unknown): HTMLElement {
  const wrap = el('div', 'entity-input');
  const input = el('input') as HTMLInputElement;
  input.type = 'text';
  input.id = question.id;
  input.placeholder = `type to search ${question.entity_kind ?? 'entities'}...`;
  input.oninput = () => {
    wizard.suggestInput(question.id, input.value);
    setTimeout(renderWizard, wizard.debounceMs + 150);
  };
  wrap.append(input);

  const addInline = el('button', '', 'add as new entity');
  addInline.onclick = async () => {
    const label = input.value.trim();
    if (!label) return;
    const value = { inline: { label } };
    await wizard.setAnswer(
      question.id,
      question.type === 'entity_ref_list' ? appendToList(current, value) : value,
    );
    renderWizard();
  };
  wrap.append(addInline);

  const panelState = wizard.suggestions.get(question.id);
  if (panelState && panelState.candidates.length) {
    const list = el('ul', 'suggestions');
    for (const candidate of panelState.candidates) {
      const item = el('li');
      item.append(
        el('span', `badge badge-${candidate.provenance}`, candidate.provenance),
        el('span', 'candidate-label', ` ${candidate.label} `),
        el('span', 'candidate-desc', candidate.description),
      );
      const accept = el('button', '', 'use');
      accept.onclick = async () => {
        const value = candidateValue(candidate);
        await wizard.setAnswer(
          question.id,
          question.type === 'entity_ref_list' ? appendToList(current, value) : value,
        );
        renderWizard();
      };
      item.append(accept);
      list.append(item);
    }
    wrap.append(list);
  }
  if (current !== undefined) {
    wrap.append(el('p', 'current-value', JSON.stringify(current)));
  }
  return wrap;
}

function candidateValue(candidate: Candidate): unknown {
  if (candidate.provenance === 'kg' && candidate.ref) return { ref: candidate.ref };
  const inline: Record<string, unknown> = { label: candidate.label };
  if (candidate.description) inline.description = candidate.description;
  if (typeof candidate.payload.doi === 'string') {
    inline.external_ids = { doi: candidate.payload.doi };
  }
  return { inline };
}

function appendToList(current: unknown, value: unknown): unknown[] {
  return Array.isArray(current) ? [...current, value] : [value];
}

// ---------------------------------------------------------------------------
// knowledge-graph tab

async function openKgTab(entityId?: string): Promise<void> {
  setActiveTab('kg');
  const host = root();
  host.innerHTML = '';
  const controls = el('div', 'kg-controls');
  const kindInput = el('input') as HTMLInputElement;
  kindInput.placeholder = 'kind (e.g. MathematicalModel)';
  const textInput = el('input') as HTMLInputElement;
  textInput.placeholder = 'label contains...';
  const searchButton = el('button', '', 'Search');
  controls.append(kindInput, textInput, searchButton);
  host.append(controls);
  const results = el('div', 'kg-results');
  const detail = el('div', 'kg-detail');
  host.append(results, detail);

  async function runSearch() {
    const entities = await browser.search(kindInput.value.trim(), textInput.value.trim());
    results.innerHTML = '';
    if (!entities.length) {
      results.append(el('p', 'empty-state', 'no entities match'));
      return;
    }
    const list = el('ul', 'entity-list');
    for (const entity of entities) {
      const item = el('li');
      const link = el('a', 'entity-link', `${entity.label} (${entity.kind})`);
      link.onclick = () => void showEntity(entity.id);
      item.append(link);
      list.append(item);
    }
    results.append(list);
  }

  async function showEntity(id: string) {
    const view = await browser.open(id);
    detail.innerHTML = '';
    if (view.notFound || !view.entity) {
      detail.append(el('p', 'empty-state', `no entity with id ${id}`));
      return;
    }
    detail.append(el('h3', '', view.entity.label), el('p', '', view.entity.description));
    detail.append(el('p', 'kind-line', `${view.entity.kind} ${view.entity.id}`));
    if (view.card) {
      for (const problem of view.card.problems) {
        detail.append(
          el('p', '', `problem: ${problem.label} (${problem.fields.map((f) => f.label).join(', ')})`),
        );
      }
      for (const formulation of view.card.formulations) {
        const quantities = formulation.quantities
          .map((q) => `${q.label}${q.quantity_kinds.length ? ` [${q.quantity_kinds.map((k) => k.label).join(', ')}]` : ''}`)
          .join('; ');
        detail.append(el('p', '', `formulation: ${formulation.label} - ${quantities}`));
      }
      for (const task of view.card.tasks) {
        detail.append(
          el(
            'p',
            '',
            `task: ${task.label} (in: ${task.input_quantities.map((q) => q.label).join(', ')}; ` +
              `out: ${task.output_quantities.map((q) => q.label).join(', ')})`,
          ),
        );
      }
      for (const [role, pubs] of Object.entries(view.card.publications)) {
        detail.append(el('p', '', `${role}: ${pubs.map((p) => p.label).join('; ')}`));
      }
    }
  }

  searchButton.onclick = () => void runSearch();
  await runSearch();
  if (entityId) await showEntity(entityId);
}

// ---------------------------------------------------------------------------
// rules tab

function renderRulesTab(): void {
  setActiveTab('rules');
  const host = root();
  host.innerHTML = '';
  const controls = el('div', 'rules-controls');
  const fileInput = el('input') as HTMLInputElement;
  fileInput.type = 'file';
  fileInput.accept = '.csv';
  const orderSelect = el('select') as HTMLSelectElement;
  for (const order of ['degrevlex', 'deglex', 'lex']) {
    orderSelect.append(el('option', '', order));
  }
  const uploadButton = el('button', 'primary', 'Mine rules');
  controls.append(fileInput, orderSelect, uploadButton);
  host.append(controls);
  const status = el('p', 'job-status');
  const table = el('div', 'rules-table');
  host.append(status, table);

  uploadButton.onclick = async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    status.textContent = 'submitting...';
    const state = await panel.upload(file, file.name, orderSelect.value);
    if (state === 'failed') {
      status.textContent = '';
      status.append(el('span', 'error-banner', `job failed: ${panel.error}`));
    } else {
      const meta = panel.rulesDoc!.metadata;
      status.textContent = `${meta.rule_count} rules, order ${meta.order}, ${meta.distinct_point_count} distinct objects`;
    }
    drawTable();
  };

  function drawTable() {
    table.innerHTML = '';
    if (!panel.rulesDoc) return;
    const filter = el('select') as HTMLSelectElement;
    filter.append(el('option', '', 'all forms'));
    for (const tag of panel.formTags) filter.append(el('option', '', tag));
    filter.onchange = () => {
      panel.setFormFilter(filter.selectedIndex === 0 ? null : filter.value);
      drawTable();
    };
    table.append(filter);

    const grid = el('table');
    const head = el('tr');
    for (const column of ['text', 'form', 'support'] as const) {
      const cell = el('th', '', column);
      cell.onclick = () => {
        panel.setSort(column);
        drawTable();
      };
      head.append(cell);
    }
    grid.append(head);
    for (const row of panel.visibleRows) {
      const tr = el('tr');
      tr.append(el('td', 'rule-text', row.text), el('td', '', row.form), el('td', '', String(row.support)));
      grid.append(tr);
    }
    table.append(grid);
  }
  drawTable();
}

// ---------------------------------------------------------------------------
// shell

function setActiveTab(name: string): void {
  for (const button of document.querySelectorAll('nav button')) {
    button.classList.toggle('active', button.id === `tab-${name}`);
  }
}

async function startWizardTab(): Promise<void> {
  setActiveTab('wizard');
  const resume = window.location.hash.startsWith('#session=')
    ? window.location.hash.slice('#session='.length)
    : undefined;
  if (!wizard.session) {
    try {
      await wizard.start(resume);
    } catch {
      await wizard.start(); // stored session id no longer valid
    }
    window.location.hash = `session=${wizard.sessionId}`;
  }
  renderWizard();
}

export function boot(): void {
  document.getElementById('tab-wizard')!.onclick = () => void startWizardTab();
  document.getElementById('tab-kg')!.onclick = () => void openKgTab();
  document.getElementById('tab-rules')!.onclick = () => renderRulesTab();
  void startWizardTab();
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot();
}
