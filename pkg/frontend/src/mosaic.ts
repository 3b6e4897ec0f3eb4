// Selectable image mosaic. Tiles carry only opaque tokens; there are no
// captions, so nothing about the underlying operator can show through.

export interface MosaicTile {
  token: string;
  url: string;
  blank?: boolean;
}

export interface MosaicOptions {
  cols: number;
  maxPicks: number;
  // characters mapped to slot indexes for keyboard selection
  keyMap?: string;
  onChange?: (selected: string[]) => void;
}

const DEFAULT_KEY_MAP = '1234567890qwertyui';

export class MosaicGrid {
  readonly element: HTMLElement;
  private readonly selected = new Set<string>();
  private readonly tiles: MosaicTile[];
  private readonly options: MosaicOptions;
  private readonly keyMap: string;

  constructor(tiles: MosaicTile[], options: MosaicOptions) {
    this.tiles = tiles;
    this.options = options;
    this.keyMap = options.keyMap ?? DEFAULT_KEY_MAP;
    this.element = document.createElement('div');
    this.element.className = 'mosaic';
    this.element.style.setProperty('--mosaic-cols', String(options.cols));
    tiles.forEach((tile, index) => this.element.appendChild(this.buildTile(tile, index)));
  }

  private buildTile(tile: MosaicTile, index: number): HTMLElement {
    const cell = document.createElement('div');
    cell.className = tile.blank ? 'tile tile-blank' : 'tile';
    cell.dataset.token = tile.token;
    if (!tile.blank) {
      const img = document.createElement('img');
      img.src = tile.url;
      img.alt = `tile ${index + 1}`;
      img.draggable = false;
      cell.appendChild(img);
      cell.tabIndex = 0;
      cell.addEventListener('click', () => this.toggle(tile.token));
    }
    return cell;
  }

  /** Toggle a tile. Above the cap, extra picks are ignored, except that a
   * single-pick mosaic swaps the selection. */
  toggle(token: string): void {
    const tile = this.tiles.find((t) => t.token === token);
    if (!tile || tile.blank) return;
    if (this.selected.has(token)) {
      this.selected.delete(token);
    } else if (this.selected.size < this.options.maxPicks) {
      this.selected.add(token);
    } else if (this.options.maxPicks === 1) {
      this.selected.clear();
      this.selected.add(token);
    } else {
      return; // at cap: deselect something first
    }
    this.render();
    this.options.onChange?.(this.selectedTokens());
  }

  selectedTokens(): string[] {
    return this.tiles.map((t) => t.token).filter((t) => this.selected.has(t));
  }

  /** Keyboard selection: map characters of the key map to slot indexes. */
  handleKey(key: string): void {
    const index = this.keyMap.indexOf(key.toLowerCase());
    if (index >= 0 && index < this.tiles.length) {
      this.toggle(this.tiles[index].token);
    }
  }

  bindKeys(target: EventTarget): () => void {
    const listener = (event: Event) => {
      const key = (event as KeyboardEvent).key;
      if (key) this.handleKey(key);
    };
    target.addEventListener('keydown', listener);
    return () => target.removeEventListener('keydown', listener);
  }

  private render(): void {
    for (const cell of Array.from(this.element.children)) {
      const token = (cell as HTMLElement).dataset.token ?? '';
      cell.classList.toggle('tile-selected', this.selected.has(token));
    }
  }
}
