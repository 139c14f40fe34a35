// Source rewriting: element reads become __at.ld(...), element writes become
// __at.st(...), everything else is left alone. Runs inside the module hook,
// before a file is evaluated.

import * as path from "path";
import * as ts from "typescript";
import { registerClass } from "./runtime";

const RUNTIME_IDENT = "__at";
const RUNTIME_PATH = path.join(__dirname, "runtime");

export function compile(
  source: string,
  fileName: string,
  moduleKey: string,
  instrument: boolean,
): string {
  const result = ts.transpileModule(source, {
    fileName,
    compilerOptions: {
      module: ts.ModuleKind.CommonJS,
      target: ts.ScriptTarget.ES2020,
      esModuleInterop: true,
    },
    transformers: instrument ? { before: [accessLogger(moduleKey)] } : undefined,
  });
  return result.outputText;
}

function isCompoundAssignment(kind: ts.SyntaxKind): boolean {
  return (
    kind >= ts.SyntaxKind.FirstCompoundAssignment &&
    kind <= ts.SyntaxKind.LastCompoundAssignment
  );
}

function accessLogger(moduleKey: string): ts.TransformerFactory<ts.SourceFile> {
  return (context) => (sourceFile) => {
    const f = context.factory;
    const klass = registerClass(moduleKey);
    let touched = false;

    const lineOf = (node: ts.Node): number =>
      sourceFile.getLineAndCharacterOfPosition(node.getStart(sourceFile)).line + 1;

    const helper = (name: string): ts.Expression =>
      f.createPropertyAccessExpression(f.createIdentifier(RUNTIME_IDENT), name);

    const expr = (node: ts.Node): ts.Expression =>
      ts.visitNode(node, visit) as ts.Expression;

    const plainAccess = (node: ts.ElementAccessExpression): boolean =>
      !node.questionDotToken && node.expression.kind !== ts.SyntaxKind.SuperKeyword;

    // rewrite children of an element access without logging the access itself
    const keepAccess = (node: ts.ElementAccessExpression): ts.ElementAccessExpression =>
      f.updateElementAccessExpression(
        node,
        expr(node.expression),
        expr(node.argumentExpression),
      );

    const visit = (node: ts.Node): ts.Node => {
      // a[i] = v  ->  __at.st(a, i, v, line, klass)
      if (
        ts.isBinaryExpression(node) &&
        node.operatorToken.kind === ts.SyntaxKind.EqualsToken &&
        ts.isElementAccessExpression(node.left) &&
        plainAccess(node.left)
      ) {
        touched = true;
        return f.createCallExpression(helper("st"), undefined, [
          expr(node.left.expression),
          expr(node.left.argumentExpression),
          expr(node.right),
          f.createNumericLiteral(lineOf(node.left)),
          f.createNumericLiteral(klass),
        ]);
      }
      // Compound assignment, ++/-- and delete on elements stay unrewritten
      // (their inner expressions are still visited). Those accesses go
      // unlogged, a documented blind spot like bulk copies.
      if (
        ts.isBinaryExpression(node) &&
        isCompoundAssignment(node.operatorToken.kind) &&
        ts.isElementAccessExpression(node.left)
      ) {
        return f.updateBinaryExpression(
          node,
          keepAccess(node.left),
          node.operatorToken,
          expr(node.right),
        );
      }
      if (
        ts.isPrefixUnaryExpression(node) &&
        (node.operator === ts.SyntaxKind.PlusPlusToken ||
          node.operator === ts.SyntaxKind.MinusMinusToken) &&
        ts.isElementAccessExpression(node.operand)
      ) {
        return f.updatePrefixUnaryExpression(node, keepAccess(node.operand));
      }
      if (
        ts.isPostfixUnaryExpression(node) &&
        ts.isElementAccessExpression(node.operand)
      ) {
        return f.updatePostfixUnaryExpression(node, keepAccess(node.operand));
      }
      if (ts.isDeleteExpression(node) && ts.isElementAccessExpression(node.expression)) {
        return f.updateDeleteExpression(node, keepAccess(node.expression));
      }
      // a[i]  ->  __at.ld(a, i, line, klass)
      if (ts.isElementAccessExpression(node) && plainAccess(node)) {
        touched = true;
        return f.createCallExpression(helper("ld"), undefined, [
          expr(node.expression),
          expr(node.argumentExpression),
          f.createNumericLiteral(lineOf(node)),
          f.createNumericLiteral(klass),
        ]);
      }
      return ts.visitEachChild(node, visit, context);
    };

    const body = ts.visitEachChild(sourceFile, visit, context);
    if (!touched) return body;

    const requireRuntime = f.createVariableStatement(
      undefined,
      f.createVariableDeclarationList(
        [
          f.createVariableDeclaration(
            RUNTIME_IDENT,
            undefined,
            undefined,
            f.createCallExpression(f.createIdentifier("require"), undefined, [
              f.createStringLiteral(RUNTIME_PATH),
            ]),
          ),
        ],
        ts.NodeFlags.Const,
      ),
    );
    return f.updateSourceFile(body, [requireRuntime, ...body.statements]);
  };
}
