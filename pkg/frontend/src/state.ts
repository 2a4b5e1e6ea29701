import type { Draft, ScoredComponent, ScoredLibrary } from './api';

// The workspace mirrors the server-side draft: whatever the last acknowledged
// write returned is what we display. In-flight responses that were overtaken
// by a newer request of the same kind are dropped (latest wins), so a slow
// early reply can never clobber the list a later action produced.

export type RecKind = 'type1' | 'type2' | 'type3' | 'tags';

export interface WorkspaceState {
  tags: string[];
  selected: string[];
  type1: ScoredComponent[];
  type2: ScoredComponent[];
  type3: ScoredLibrary[];
  tagSuggestions: string[];
  draftId: string | null;
  draftName: string;
  sketch: string;
  updatedAt: number | null;
}

type Listener = (state: WorkspaceState) => void;

export class WorkspaceStore {
  private state: WorkspaceState = {
    tags: [],
    selected: [],
    type1: [],
    type2: [],
    type3: [],
    tagSuggestions: [],
    draftId: null,
    draftName: 'untitled project',
    sketch: '',
    updatedAt: null,
  };

  private seq: Record<RecKind, number> = { type1: 0, type2: 0, type3: 0, tags: 0 };
  private listeners: Listener[] = [];

  snapshot(): WorkspaceState {
    return {
      ...this.state,
      tags: [...this.state.tags],
      selected: [...this.state.selected],
      type1: [...this.state.type1],
      type2: [...this.state.type2],
      type3: [...this.state.type3],
      tagSuggestions: [...this.state.tagSuggestions],
    };
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit() {
    const snap = this.snapshot();
    for (const fn of this.listeners) fn(snap);
  }

  // ---- request sequencing ----

  begin(kind: RecKind): number {
    this.seq[kind] += 1;
    return this.seq[kind];
  }

  isCurrent(kind: RecKind, token: number): boolean {
    return this.seq[kind] === token;
  }

  commitType1(token: number, items: ScoredComponent[]): boolean {
    if (!this.isCurrent('type1', token)) return false;
    this.state.type1 = items;
    this.emit();
    return true;
  }

  commitType2(token: number, items: ScoredComponent[]): boolean {
    if (!this.isCurrent('type2', token)) return false;
    this.state.type2 = items;
    this.emit();
    return true;
  }

  commitType3(token: number, items: ScoredLibrary[]): boolean {
    if (!this.isCurrent('type3', token)) return false;
    this.state.type3 = items;
    this.emit();
    return true;
  }

  commitTagSuggestions(token: number, names: string[]): boolean {
    if (!this.isCurrent('tags', token)) return false;
    this.state.tagSuggestions = names;
    this.emit();
    return true;
  }

  // ---- local edits ----

  addTag(tag: string) {
    const t = tag.trim().toLowerCase();
    if (!t || this.state.tags.includes(t)) return;
    this.state.tags = [...this.state.tags, t];
    this.emit();
  }

  removeTag(tag: string) {
    this.state.tags = this.state.tags.filter((t) => t !== tag);
    this.emit();
  }

  addComponent(id: string) {
    if (this.state.selected.includes(id)) return;
    this.state.selected = [...this.state.selected, id];
    this.emit();
  }

  removeComponent(id: string) {
    this.state.selected = this.state.selected.filter((c) => c !== id);
    this.emit();
  }

  setSketch(text: string) {
    this.state.sketch = text;
    this.emit();
  }

  setDraftName(name: string) {
    this.state.draftName = name;
    this.emit();
  }

  // Server acknowledgement replaces the local mirror wholesale; the server
  // sorts and dedups the component list, and its copy is the truth.
  applyDraft(draft: Draft) {
    this.state.draftId = draft.id;
    this.state.draftName = draft.name;
    this.state.selected = [...draft.selected_components];
    this.state.updatedAt = draft.updated_at;
    this.emit();
  }
}
