const { BlobServiceClient } = require('@azure/storage-blob');

const service = BlobServiceClient.fromConnectionString(process.env.STORAGE_CONN);

exports.handler = async () => {
  const container = service.getContainerClient(process.env.INBOX_CONTAINER);
  const names = [];
  for await (const item of container.listBlobsFlat()) {
    names.push(item.name);
  }
  return { blobs: names };
};
