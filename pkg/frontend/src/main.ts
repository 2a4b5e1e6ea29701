import { ApiError, Client } from './api';
import type { ScoredComponent, ScoredLibrary } from './api';
import { WorkspaceStore } from './state';
import { highlight } from './highlight';

const LIST_N = 8;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

export function sketchFilename(draftName: string): string {
  const stem = draftName.trim().replace(/[^\w.-]+/g, '_') || 'sketch';
  return stem.endsWith('.ino') ? stem : stem + '.ino';
}

export function sketchBlob(text: string): Blob {
  return new Blob([text], { type: 'text/plain;charset=utf-8' });
}

export function initApp(root: HTMLElement, client: Client): WorkspaceStore {
  const store = new WorkspaceStore();

  root.innerHTML = '';

  // ---- static skeleton ----

  const header = el('header');
  header.append(el('h1', {}, 'resyduo workspace'));
  const healthBadge = el('span', { id: 'health', class: 'health' }, 'checking service...');
  header.append(healthBadge);

  const banner = el('div', { id: 'banner', class: 'banner', hidden: '' });

  const tagSection = el('section', { id: 'tag-section' });
  tagSection.append(el('h2', {}, 'project tags'));
  const tagInput = el('input', {
    id: 'tag-input', list: 'tag-options',
    placeholder: 'type a tag, e.g. wifi', autocomplete: 'off',
  });
  const tagOptions = el('datalist', { id: 'tag-options' });
  const addTagBtn = el('button', { id: 'add-tag' }, 'add tag');
  const tagChips = el('ul', { id: 'tag-chips', class: 'chips' });
  const suggestBtn = el('button', { id: 'suggest', class: 'primary' },
    'suggest components');
  tagSection.append(tagInput, tagOptions, addTagBtn, tagChips, suggestBtn);

  const columns = el('div', { class: 'columns' });

  const type1Col = el('section', { id: 'type1-col' });
  type1Col.append(el('h2', {}, 'components for your tags'));
  const type1List = el('ol', { id: 'type1-list', class: 'rec-list' });
  type1Col.append(type1List);

  const workCol = el('section', { id: 'workspace-col' });
  workCol.append(el('h2', {}, 'selected components'));
  const selectedChips = el('ul', { id: 'selected-chips', class: 'chips' });
  workCol.append(selectedChips);
  workCol.append(el('h2', {}, 'components from similar projects'));
  const type2List = el('ol', { id: 'type2-list', class: 'rec-list' });
  workCol.append(type2List);

  const libCol = el('section', { id: 'type3-col' });
  libCol.append(el('h2', {}, 'libraries for your components'));
  const type3List = el('ol', { id: 'type3-list', class: 'rec-list' });
  libCol.append(type3List);

  columns.append(type1Col, workCol, libCol);

  const editor = el('section', { id: 'editor' });
  editor.append(el('h2', {}, 'sketch'));
  const nameInput = el('input', { id: 'draft-name', value: 'untitled project' });
  const sketchArea = el('textarea', {
    id: 'sketch', rows: '14', spellcheck: 'false',
    placeholder: 'void setup() {\n}\n\nvoid loop() {\n}\n',
  });
  const preview = el('pre', { id: 'preview', 'aria-hidden': 'true' });
  const saveBtn = el('button', { id: 'save', class: 'primary' }, 'save project');
  const downloadBtn = el('button', { id: 'download' }, 'download sketch');
  const saveStatus = el('span', { id: 'save-status' });
  const pane = el('div', { class: 'editor-pane' });
  pane.append(sketchArea, preview);
  editor.append(nameInput, pane, saveBtn, downloadBtn, saveStatus);

  root.append(header, banner, tagSection, columns, editor);

  // ---- error banner ----

  function showError(err: unknown) {
    banner.hidden = false;
    if (err instanceof ApiError) {
      banner.textContent = `${err.code}: ${err.message}`;
    } else {
      banner.textContent = String(err);
    }
  }

  function clearError() {
    banner.hidden = true;
    banner.textContent = '';
  }

  // ---- remote actions, latest-wins per kind ----

  async function loadTagSuggestions(prefix: string) {
    const token = store.begin('tags');
    try {
      const names = await client.tags(prefix);
      store.commitTagSuggestions(token, names);
    } catch {
      // autocomplete is best effort; a missing T model just means no options
    }
  }

  async function runType1() {
    const tags = store.snapshot().tags;
    if (tags.length === 0) return;
    const token = store.begin('type1');
    try {
      const items = await client.componentsByTags(tags, LIST_N);
      if (store.commitType1(token, items)) clearError();
    } catch (err) {
      if (store.isCurrent('type1', token)) showError(err);
    }
  }

  async function refreshDerived() {
    const selected = store.snapshot().selected;
    const t2 = store.begin('type2');
    const t3 = store.begin('type3');
    if (selected.length === 0) {
      store.commitType2(t2, []);
      store.commitType3(t3, []);
      return;
    }
    await Promise.all([
      client.componentsByProject(selected, LIST_N)
        .then((items) => { if (store.commitType2(t2, items)) clearError(); })
        .catch((err) => { if (store.isCurrent('type2', t2)) showError(err); }),
      client.libraries(selected, LIST_N)
        .then((items) => { if (store.commitType3(t3, items)) clearError(); })
        .catch((err) => { if (store.isCurrent('type3', t3)) showError(err); }),
    ]);
  }

  async function saveDraft() {
    const s = store.snapshot();
    try {
      let draft;
      if (s.draftId === null) {
        draft = await client.createDraft(s.draftName, s.selected, s.sketch);
      } else {
        draft = await client.updateDraft(s.draftId, {
          name: s.draftName,
          selected_components: s.selected,
        });
        await client.putSketch(s.draftId, s.sketch);
      }
      store.applyDraft(draft);
      saveStatus.textContent = `saved ${draft.id}`;
      clearError();
    } catch (err) {
      showError(err);
    }
  }

  function downloadSketch() {
    const s = store.snapshot();
    const blob = sketchBlob(s.sketch);
    const a = el('a', {
      href: URL.createObjectURL(blob),
      download: sketchFilename(s.draftName),
    });
    root.append(a);
    a.click();
    a.remove();
  }

  // ---- rendering ----

  function scoreLine(score: number): string {
    return score.toFixed(3);
  }

  function renderComponentList(list: HTMLOListElement, items: ScoredComponent[],
                               selected: string[]) {
    list.innerHTML = '';
    for (const item of items) {
      const li = el('li');
      li.append(
        el('span', { class: 'rec-id' }, item.id),
        el('span', { class: 'rec-score' }, scoreLine(item.score)),
      );
      const btn = el('button', { class: 'accept', 'data-id': item.id }, 'add');
      if (selected.includes(item.id)) btn.disabled = true;
      btn.addEventListener('click', () => {
        store.addComponent(item.id);
        void refreshDerived();
      });
      li.append(btn);
      list.append(li);
    }
  }

  function renderLibraryList(list: HTMLOListElement, items: ScoredLibrary[]) {
    list.innerHTML = '';
    for (const item of items) {
      const li = el('li');
      li.append(
        el('span', { class: 'rec-id' }, item.name),
        el('span', { class: 'rec-score' }, scoreLine(item.score)),
      );
      list.append(li);
    }
  }

  function render() {
    const s = store.snapshot();

    tagOptions.innerHTML = '';
    for (const name of s.tagSuggestions) {
      tagOptions.append(el('option', { value: name }));
    }

    tagChips.innerHTML = '';
    for (const tag of s.tags) {
      const li = el('li', { class: 'chip' }, tag);
      const rm = el('button', { class: 'remove', 'data-tag': tag }, 'x');
      rm.addEventListener('click', () => store.removeTag(tag));
      li.append(rm);
      tagChips.append(li);
    }

    selectedChips.innerHTML = '';
    for (const id of s.selected) {
      const li = el('li', { class: 'chip' }, id);
      const rm = el('button', { class: 'remove', 'data-id': id }, 'x');
      rm.addEventListener('click', () => {
        store.removeComponent(id);
        void refreshDerived();
      });
      li.append(rm);
      selectedChips.append(li);
    }

    renderComponentList(type1List, s.type1, s.selected);
    renderComponentList(type2List, s.type2, s.selected);
    renderLibraryList(type3List, s.type3);

    preview.innerHTML = highlight(s.sketch);
  }

  store.subscribe(render);
  render();

  // ---- event wiring ----

  tagInput.addEventListener('input', () => {
    const prefix = tagInput.value.trim();
    if (prefix) void loadTagSuggestions(prefix);
  });

  function addTagFromInput() {
    if (!tagInput.value.trim()) return;
    store.addTag(tagInput.value);
    tagInput.value = '';
  }

  addTagBtn.addEventListener('click', addTagFromInput);
  tagInput.addEventListener('keydown', (e) => {
    if (e.key === 'Enter') addTagFromInput();
  });

  suggestBtn.addEventListener('click', () => void runType1());

  nameInput.addEventListener('input', () => store.setDraftName(nameInput.value));
  sketchArea.addEventListener('input', () => store.setSketch(sketchArea.value));

  saveBtn.addEventListener('click', () => void saveDraft());
  downloadBtn.addEventListener('click', downloadSketch);

  client.health()
    .then((h) => {
      const loaded = Object.entries(h.models)
        .filter(([, ok]) => ok).map(([k]) => k).join(' ');
      healthBadge.textContent = loaded
        ? `service: ${h.status} (models: ${loaded})`
        : `service: ${h.status} (no models loaded)`;
    })
    .catch(() => {
      healthBadge.textContent = 'service unreachable';
    });

  return store;
}

// Entry point for the bundled page; tests import initApp directly instead.
const mount = typeof document !== 'undefined'
  ? document.getElementById('app')
  : null;
if (mount) {
  initApp(mount, new Client(''));
}
